#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sam/command.hpp"
#include "sam/lifecycle.hpp"
#include "sam/literal.hpp"
#include "sam/monitor.hpp"
#include "sam/self_model.hpp"

namespace sam::bdi {

struct Goal {
    std::string name;
    std::vector<std::string> args;  // may contain variables in triggers

    auto operator<=>(const Goal&) const = default;
    std::string str() const;
};

struct Step {
    enum class Kind { Act, AddBelief, DropBelief, SubGoal };

    Kind kind = Kind::Act;
    std::string name;               // Act action / SubGoal goal name
    std::vector<std::string> args;  // Act / SubGoal arguments
    Literal lit;                    // AddBelief / DropBelief payload

    auto operator<=>(const Step&) const = default;
};

struct PlanRule {
    Goal trigger;
    std::vector<Literal> guard;  // positive and negative, may contain variables
    std::vector<NumericConstraint> guard_num;
    std::vector<Step> body;

    auto operator<=>(const PlanRule&) const = default;
};

struct NoApplicablePlan : std::runtime_error {
    explicit NoApplicablePlan(const std::string& goal)
        : std::runtime_error("no applicable plan for goal " + goal) {}
};

struct Intention {
    uint64_t id = 0;
    Goal goal;  // ground
    PlanRule plan;  // instantiated
    size_t pc = 0;
    ExecStatus status = ExecStatus::Active;
    std::optional<ActionExecutionRecord> active_action;
    std::optional<uint64_t> waiting_child;  // subgoal intention id
    std::optional<uint64_t> parent;
    bool needs_reconfiguration = false;  // failed action routed to repair
    bool held = false;                   // runner-side hold (abort/backtrack, learning)
};

struct Percepts {
    std::vector<Literal> literals;  // negative literals retract beliefs
    std::map<std::string, double> fluents;
};

struct AgentState {
    State beliefs;
    /// Predicates single-valued per first argument; a new percept replaces
    /// the old value instead of accumulating.
    std::set<std::string> functional_predicates{"at"};
    std::vector<std::pair<Goal, ExecStatus>> goals;
    std::vector<PlanRule> plan_library;
    std::vector<Intention> intentions;
    std::shared_ptr<SelfModel> model;
    uint64_t next_intention_id = 1;
    uint64_t next_action_seq = 1;

    Intention* find_intention(uint64_t id);
    const Intention* find_intention(uint64_t id) const;
};

State update_beliefs(const State& beliefs, const Percepts& percepts,
                     const std::set<std::string>& functional_predicates);

/// First rule in declaration order whose trigger unifies with the goal and
/// whose guard holds, instantiated with the lexicographically least ground
/// substitution (variables ordered by name).
PlanRule select_plan(const Goal& goal, const State& beliefs,
                     const std::vector<PlanRule>& library);

struct VerdictEvent {
    uint64_t intention_id = 0;
    std::string action_id;
    std::string name;
    int version = 1;
    MonitorVerdict verdict;
};

struct DeliberationResult {
    AgentState agent;
    std::vector<ActionCommand> commands;
    std::vector<VerdictEvent> verdicts;
    std::vector<std::string> diagnostics;
};

/// One deliberation cycle: perceive, monitor active actions (success resumes
/// the owning intention, failure routes it to reconfiguration), step each
/// unblocked intention once. Pure function of (agent, percepts).
DeliberationResult deliberate(const AgentState& agent, const Percepts& percepts);

/// Plan library file: JSON list of {trigger, guard, body}.
std::vector<PlanRule> plan_library_from_json(const std::string& text);
std::string plan_library_to_json(const std::vector<PlanRule>& rules);

}  // namespace sam::bdi
