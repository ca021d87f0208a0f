#include "sam/monitor.hpp"

#include <algorithm>

namespace sam {

std::string_view to_string(VerdictReason r) {
    switch (r) {
        case VerdictReason::None: return "None";
        case VerdictReason::PostconditionsAchieved: return "PostconditionsAchieved";
        case VerdictReason::TimeThreshold: return "TimeThreshold";
        case VerdictReason::EnergyThreshold: return "EnergyThreshold";
        case VerdictReason::ContradictionObserved: return "ContradictionObserved";
        case VerdictReason::AbortRequested: return "AbortRequested";
    }
    return "?";
}

VerdictReason verdict_reason_from_string(std::string_view s) {
    if (s == "None") return VerdictReason::None;
    if (s == "PostconditionsAchieved") return VerdictReason::PostconditionsAchieved;
    if (s == "TimeThreshold") return VerdictReason::TimeThreshold;
    if (s == "EnergyThreshold") return VerdictReason::EnergyThreshold;
    if (s == "ContradictionObserved") return VerdictReason::ContradictionObserved;
    if (s == "AbortRequested") return VerdictReason::AbortRequested;
    throw std::invalid_argument("unknown verdict reason: " + std::string(s));
}

std::string_view to_string(FailureClassification c) {
    return c == FailureClassification::Anomalous ? "Anomalous" : "Persistent";
}

MonitorVerdict monitor(const ActionExecutionRecord& record, const State& observed, uint64_t tick) {
    // (a) only Active actions are checked
    if (record.status != ExecStatus::Active) return {record.status, record.last_reason};

    // (b)
    if (record.abort_requested) return {ExecStatus::Aborting, VerdictReason::AbortRequested};

    // (c) thresholds; time checked before energy
    double elapsed = static_cast<double>(tick - record.start_tick);
    if (elapsed > record.d_max) return {ExecStatus::Failed, VerdictReason::TimeThreshold};
    double spent = record.energy_at_start - observed.fluent("energy");
    if (spent > record.e_max) return {ExecStatus::Failed, VerdictReason::EnergyThreshold};

    // (d) a delete-target re-asserted as permanent by the environment
    for (const Literal& l : record.permanent_contradictions)
        if (record.expected_deletes.count(l) && observed.holds(l))
            return {ExecStatus::Failed, VerdictReason::ContradictionObserved};

    // (e)
    bool adds_ok = std::all_of(record.expected_adds.begin(), record.expected_adds.end(),
                               [&](const Literal& l) { return observed.holds(l); });
    bool dels_ok = std::none_of(record.expected_deletes.begin(), record.expected_deletes.end(),
                                [&](const Literal& l) { return observed.holds(l); });
    if (adds_ok && dels_ok)
        return {ExecStatus::Succeeded, VerdictReason::PostconditionsAchieved};

    // (f)
    return {ExecStatus::Active, VerdictReason::None};
}

FailureClassification classify_failure(const std::deque<Outcome>& window) {
    if (window.empty()) throw EmptyWindow();
    int failures = static_cast<int>(std::count(window.begin(), window.end(), Outcome::Failed));
    return failures < kSuspectFailures ? FailureClassification::Anomalous
                                       : FailureClassification::Persistent;
}

}  // namespace sam
