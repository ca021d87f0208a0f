#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sam/literal.hpp"
#include "sam/self_model.hpp"

namespace sam::learner {

/// One completed execution episode of an action.
struct ExecutionTrace {
    std::string name;
    std::vector<std::string> args;
    State pre_state;
    State post_state;
    double duration = 0;  // ticks
    double energy = 0;    // units spent
    Outcome outcome = Outcome::Succeeded;
    std::string trace_id;
};

struct InsufficientData : std::runtime_error {
    InsufficientData() : std::runtime_error("need at least 2 successful traces") {}
};
struct InconsistentSchema : std::runtime_error {
    InconsistentSchema() : std::runtime_error("trace arity or name mismatch") {}
};
struct EmptyEffects : std::runtime_error {
    EmptyEffects() : std::runtime_error("no literal consistently changes; vacuous action") {}
};

struct Effects {
    std::set<Literal> adds;     // lifted
    std::set<Literal> deletes;  // lifted
};

/// Deterministic effect induction: a lifted literal is an add iff it is
/// present in the post-state and absent in the pre-state of every successful
/// trace (deletes dually). Arguments matching the action's arguments lift to
/// the corresponding parameter; a literal survives only if at least one
/// argument lifts and any remaining constants agree across traces.
Effects learn_effects(const std::vector<ExecutionTrace>& traces);

struct Thresholds {
    double d_max = 0;
    double e_max = 0;
};

/// d_max = ceil(mean + k * population stddev) over durations; e_max dually.
Thresholds estimate_thresholds(const std::vector<std::pair<double, double>>& samples,
                               double k = 2.0);

struct LearnedDescription {
    ActionDescription description;
    int support = 0;
    std::vector<std::string> provenance;
};

/// Propose a replacement description (effects + preconditions induced from
/// traces, thresholds re-estimated, version bumped). Committing is the
/// caller's decision via SelfModel::replace_description.
LearnedDescription synthesize_description(const std::string& name,
                                          const std::vector<ExecutionTrace>& traces,
                                          const SelfModel& model, double k = 2.0);

/// Line-delimited JSON, one trace per line:
/// {name, args, pre, post, duration, energy, outcome}
std::string traces_to_jsonl(const std::vector<ExecutionTrace>& traces);
std::vector<ExecutionTrace> traces_from_jsonl(const std::string& text);

}  // namespace sam::learner
