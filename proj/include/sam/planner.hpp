#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sam/literal.hpp"
#include "sam/self_model.hpp"

namespace sam::planner {

struct GroundAction {
    std::string name;
    int version = 1;
    std::vector<std::string> args;
    std::set<Literal> pre;  // ground, may contain negatives
    std::vector<NumericConstraint> num_pre;
    std::set<Literal> adds;
    std::set<Literal> deletes;
    std::vector<NumericEffect> numeric_effects;
    double d_min = 0, d_max = 0;
    double e_min = 0, e_max = 0;

    auto operator<=>(const GroundAction&) const = default;

    bool applicable(const State& s) const;
    State apply(const State& s) const;  // nominal effects
    std::string str() const;
};

/// Instantiate a description with concrete arguments (no model lookup).
GroundAction ground_action(const ActionDescription& desc, const std::vector<std::string>& args);

/// All type-correct bindings of the functional (non-Deprecated) descriptions,
/// respecting distinctness constraints.
std::vector<GroundAction> ground_actions(
    const SelfModel& model, const std::vector<std::pair<std::string, std::string>>& objects);

struct Budget {
    double time_budget = 0;
    double energy_budget = 0;
};

struct PlanningProblem {
    State init;
    std::set<Literal> goal;  // positive ground
    std::vector<GroundAction> actions;
    double w_time = 1.0;
    double w_energy = 1.0;
    std::optional<Budget> budget;
};

struct PlanResult {
    std::vector<GroundAction> steps;
    double cost = 0;
    size_t expanded_nodes = 0;
};

struct Unsolvable : std::runtime_error {
    Unsolvable() : std::runtime_error("planning problem unsolvable") {}
};
struct IndexOutOfRange : std::out_of_range {
    IndexOutOfRange() : std::out_of_range("failed_index out of range") {}
};
struct BoundExceeded : std::invalid_argument {
    BoundExceeded() : std::invalid_argument("plan length exceeds safety branch bound") {}
};

/// Uniform-cost forward search; step cost = w_time*d_max + w_energy*e_max.
/// Equal-cost ties resolve to the lexicographically least (name, args) plan.
PlanResult solve(const PlanningProblem& problem);

struct ValidationResult {
    bool ok = false;
    std::optional<size_t> first_violation;
};

/// Simulate nominal effects; every step's preconditions must hold in its
/// pre-state.
ValidationResult validate_plan(const std::vector<GroundAction>& steps, const State& init);

enum class RepairKind { Patched, NeedLearning, Unrepairable };

std::string_view to_string(RepairKind k);

struct RepairResult {
    RepairKind kind = RepairKind::Unrepairable;
    std::vector<GroundAction> steps;  // subplan ++ plan[failed_index+1..] when Patched
    double sub_cost = 0;
};

/// Re-achieve the failed step's expected adds from `current` using functional
/// actions only, then splice the remainder of the plan back on.
RepairResult repair_plan(const std::vector<GroundAction>& plan, size_t failed_index,
                         const State& current, const SelfModel& model,
                         const std::vector<std::pair<std::string, std::string>>& objects,
                         std::optional<Budget> budget, double w_time = 1.0, double w_energy = 1.0);

struct Conjunct {
    std::vector<Literal> literals;  // ground, may be negative
    std::vector<NumericConstraint> fluents;
};

/// A state matching any conjunct violates safety.
struct SafetyProperty {
    std::vector<Conjunct> forbidden;

    bool violates(const State& s) const;
};

struct SafetyResult {
    bool certified = true;
    std::vector<bool> outcome_vector;  // true = step failed, set on counterexample
    std::vector<State> states;         // init plus one state per step
};

/// Exhaustively explore all 2^|steps| outcome combinations. A failed step
/// applies no literal effects but consumes d_max ticks and e_max energy.
SafetyResult check_safety(const std::vector<GroundAction>& steps, const State& init,
                          const SafetyProperty& props, size_t branch_bound = 12);

}  // namespace sam::planner
