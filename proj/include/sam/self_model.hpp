#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sam/lifecycle.hpp"
#include "sam/literal.hpp"

namespace sam {

enum class Outcome { Succeeded, Failed };

std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

enum class NumOp { Increase, Decrease };

struct NumericEffect {
    std::string fluent;
    NumOp op = NumOp::Decrease;
    double amount = 0.0;

    auto operator<=>(const NumericEffect&) const = default;

    /// Signed delta applied to the fluent.
    double delta() const { return op == NumOp::Increase ? amount : -amount; }
};

/// Self-model entry: the agent's formal description of one durative action.
struct ActionDescription {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;  // (?var, type)
    std::set<std::pair<std::string, std::string>> distinct;   // var pairs required unequal
    std::set<Literal> pre;                                    // may contain negatives
    std::vector<NumericConstraint> num_pre;
    std::set<Literal> adds;     // positive
    std::set<Literal> deletes;  // positive
    std::vector<NumericEffect> numeric_effects;
    double d_min = 0, d_max = 0;  // duration bound, ticks
    double e_min = 0, e_max = 0;  // energy bound, units
    HealthStatus health = HealthStatus::Functional;
    std::deque<Outcome> outcome_window;  // ring, capacity kOutcomeWindow
    int version = 1;

    auto operator<=>(const ActionDescription&) const = default;
};

struct DuplicateAction : std::runtime_error {
    explicit DuplicateAction(const std::string& n) : std::runtime_error("duplicate action: " + n) {}
};
struct UnknownAction : std::runtime_error {
    explicit UnknownAction(const std::string& n) : std::runtime_error("unknown action: " + n) {}
};
struct StaleVersion : std::runtime_error {
    explicit StaleVersion(const std::string& n) : std::runtime_error("stale version for: " + n) {}
};
struct VocabularyViolation : std::runtime_error {
    explicit VocabularyViolation(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidDescription : std::runtime_error {
    explicit InvalidDescription(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr size_t kOutcomeWindow = 5;    // W
inline constexpr int kSuspectFailures = 2;     // Functional -> Suspect threshold
inline constexpr int kRecoverySuccesses = 3;   // Suspect -> Functional, consecutive

/// Repository of action descriptions keyed by (name, version).
/// Single-writer: mutated only inside the deliberation tick.
struct SelfModel {
    // versions kept in ascending order; replaced versions stay, Deprecated
    std::map<std::string, std::vector<ActionDescription>> actions;
    std::set<std::string> type_hierarchy;
    std::set<std::pair<std::string, int>> predicate_vocab;  // (predicate, arity)
    std::set<std::string> fluent_vocab;
    uint64_t revision = 0;

    uint64_t register_action(ActionDescription desc);
    HealthStatus record_outcome(const std::string& name, Outcome outcome, uint64_t tick);
    std::vector<ActionDescription> functional_actions() const;
    uint64_t replace_description(const std::string& name, ActionDescription new_desc);

    /// Latest non-Deprecated version, or the latest version if all deprecated.
    const ActionDescription* current(const std::string& name) const;
    const ActionDescription* find(const std::string& name, int version) const;
    bool known(const std::string& name) const { return actions.count(name) > 0; }

  private:
    void check_invariants(const ActionDescription& desc) const;
};

}  // namespace sam
