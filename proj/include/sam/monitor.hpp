#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "sam/lifecycle.hpp"
#include "sam/literal.hpp"
#include "sam/self_model.hpp"

namespace sam {

enum class VerdictReason {
    None,
    PostconditionsAchieved,
    TimeThreshold,
    EnergyThreshold,
    ContradictionObserved,
    AbortRequested
};

std::string_view to_string(VerdictReason r);
VerdictReason verdict_reason_from_string(std::string_view s);

/// Book-keeping for one dispatched durative action.
struct ActionExecutionRecord {
    std::string action_id;
    std::string name;
    int version = 1;
    std::vector<std::string> args;
    uint64_t start_tick = 0;
    std::set<Literal> expected_adds;     // ground
    std::set<Literal> expected_deletes;  // ground
    double d_max = 0;
    double e_max = 0;
    double energy_at_start = 0;
    ExecStatus status = ExecStatus::Pending;
    VerdictReason last_reason = VerdictReason::None;
    bool abort_requested = false;
    /// Delete-target literals the environment has re-asserted as permanent
    /// (e.g. departure refused on a blocked edge); set from environment events.
    std::set<Literal> permanent_contradictions;
};

struct MonitorVerdict {
    ExecStatus status = ExecStatus::Active;
    VerdictReason reason = VerdictReason::None;
    auto operator<=>(const MonitorVerdict&) const = default;
};

/// Per-tick surveillance of one executing action. Priority order:
///   (a) non-Active status is returned unchanged
///   (b) abort requested            -> Aborting / AbortRequested
///   (c) time or energy over bound  -> Failed / {Time,Energy}Threshold
///   (d) permanent contradiction    -> Failed / ContradictionObserved
///   (e) postconditions achieved    -> Succeeded / PostconditionsAchieved
///   (f) otherwise                  -> Active / None
/// A Failed verdict obligates the caller to route into plan repair.
MonitorVerdict monitor(const ActionExecutionRecord& record, const State& observed, uint64_t tick);

enum class FailureClassification { Anomalous, Persistent };

std::string_view to_string(FailureClassification c);

struct EmptyWindow : std::logic_error {
    EmptyWindow() : std::logic_error("classify_failure on empty window") {}
};

/// Anomalous: failures in the window below the Suspect threshold, so the
/// action is simply re-attempted. Persistent: repair is required.
FailureClassification classify_failure(const std::deque<Outcome>& window);

}  // namespace sam
