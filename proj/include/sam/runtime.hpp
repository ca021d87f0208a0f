#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sam/bdi.hpp"
#include "sam/monitor.hpp"
#include "sam/pddl.hpp"
#include "sam/planner.hpp"
#include "sam/sim.hpp"

namespace sam::runtime {

struct FailureNote {
    uint64_t tick = 0;
    std::string action_id;
    VerdictReason reason = VerdictReason::None;
    FailureClassification classification = FailureClassification::Anomalous;
};

struct RepairNote {
    uint64_t tick = 0;
    planner::RepairKind kind = planner::RepairKind::Unrepairable;
};

struct RunReport {
    std::string mission_outcome = "Failed";  // Achieved | Failed | SafetyViolation
    uint64_t ticks_elapsed = 0;
    double energy_used = 0;
    std::vector<FailureNote> failures;
    std::vector<RepairNote> repairs;
    std::vector<std::pair<std::string, int>> learned;  // (name, version)
    std::map<std::string, std::pair<HealthStatus, int>> final_health;
};

struct RunOptions {
    uint64_t tick_limit = 10000;
    bool learning = true;  // false: NeedLearning surfaces as mission failure
    std::optional<planner::SafetyProperty> safety;
    double w_time = 1.0;
    double w_energy = 1.0;
};

struct RunResult {
    int exit_code = 1;  // 0 Achieved, 1 Failed, 3 SafetyViolation
    RunReport report;
    std::vector<std::string> trace_lines;  // line-delimited JSON records
    SelfModel model;                       // post-run model (health, learned versions)
};

/// Drive the deliberate/tick loop to completion: monitoring, failure
/// classification, abort-and-backtrack, plan repair, and trace-based
/// learning of replacement descriptions.
RunResult run_scenario(const pddl::DomainDocument& domain,
                       const std::vector<bdi::PlanRule>& plans, const sim::Scenario& scenario,
                       const RunOptions& options, const std::string& health_sidecar = "");

std::string report_to_json(const RunReport& report);

/// {"forbidden":[{"literals":[{pred,args,neg?}],"fluents":[{fluent,cmp,bound}]}]}
planner::SafetyProperty safety_from_json(const std::string& text);

struct ReplayResult {
    bool ok = true;
    std::vector<std::string> recorded;     // verdict lines found in the trace
    std::vector<std::string> regenerated;  // verdicts recomputed from percepts
    std::vector<std::string> mismatches;
};

/// Re-run the monitor over a recorded trace: action records are rebuilt from
/// Command records, the observed state from Percept records. Fidelity holds
/// when the regenerated verdicts equal the recorded ones.
ReplayResult replay_trace(const std::string& trace_text);

}  // namespace sam::runtime
