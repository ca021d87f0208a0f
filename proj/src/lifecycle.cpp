#include "sam/lifecycle.hpp"

namespace sam {

ExecStatus step_exec(ExecStatus status, ExecEvent event) {
    switch (status) {
        case ExecStatus::Pending:
            if (event == ExecEvent::Start) return ExecStatus::Active;
            break;
        case ExecStatus::Active:
            if (event == ExecEvent::SuccessObserved) return ExecStatus::Succeeded;
            if (event == ExecEvent::FailureObserved) return ExecStatus::Failed;
            if (event == ExecEvent::SuspendRequest) return ExecStatus::Suspended;
            if (event == ExecEvent::AbortRequest) return ExecStatus::Aborting;
            break;
        case ExecStatus::Suspended:
            if (event == ExecEvent::ResumeRequest) return ExecStatus::Active;
            if (event == ExecEvent::AbortRequest) return ExecStatus::Aborting;
            break;
        case ExecStatus::Aborting:
            if (event == ExecEvent::AbortComplete) return ExecStatus::Aborted;
            break;
        case ExecStatus::Aborted:
        case ExecStatus::Succeeded:
        case ExecStatus::Failed:
            break;
    }
    throw IllegalTransition(std::string(to_string(status)), std::string(to_string(event)));
}

HealthStatus step_health(HealthStatus health, HealthEvent event) {
    switch (health) {
        case HealthStatus::Functional:
            if (event == HealthEvent::PersistentFailure) return HealthStatus::Suspect;
            break;
        case HealthStatus::Suspect:
            if (event == HealthEvent::RepeatedFailure) return HealthStatus::Deprecated;
            if (event == HealthEvent::RecoveryObserved) return HealthStatus::Functional;
            break;
        case HealthStatus::Deprecated:
            break;
    }
    throw IllegalTransition(std::string(to_string(health)), std::string(to_string(event)));
}

bool is_terminal(ExecStatus status) {
    return status == ExecStatus::Aborted || status == ExecStatus::Succeeded ||
           status == ExecStatus::Failed;
}

std::string_view to_string(ExecStatus s) {
    switch (s) {
        case ExecStatus::Pending: return "Pending";
        case ExecStatus::Active: return "Active";
        case ExecStatus::Suspended: return "Suspended";
        case ExecStatus::Aborting: return "Aborting";
        case ExecStatus::Aborted: return "Aborted";
        case ExecStatus::Succeeded: return "Succeeded";
        case ExecStatus::Failed: return "Failed";
    }
    return "?";
}

std::string_view to_string(HealthStatus s) {
    switch (s) {
        case HealthStatus::Functional: return "Functional";
        case HealthStatus::Suspect: return "Suspect";
        case HealthStatus::Deprecated: return "Deprecated";
    }
    return "?";
}

std::string_view to_string(ExecEvent e) {
    switch (e) {
        case ExecEvent::Start: return "Start";
        case ExecEvent::SuccessObserved: return "SuccessObserved";
        case ExecEvent::FailureObserved: return "FailureObserved";
        case ExecEvent::SuspendRequest: return "SuspendRequest";
        case ExecEvent::ResumeRequest: return "ResumeRequest";
        case ExecEvent::AbortRequest: return "AbortRequest";
        case ExecEvent::AbortComplete: return "AbortComplete";
    }
    return "?";
}

std::string_view to_string(HealthEvent e) {
    switch (e) {
        case HealthEvent::PersistentFailure: return "PersistentFailure";
        case HealthEvent::RepeatedFailure: return "RepeatedFailure";
        case HealthEvent::RecoveryObserved: return "RecoveryObserved";
    }
    return "?";
}

ExecStatus exec_status_from_string(std::string_view s) {
    if (s == "Pending") return ExecStatus::Pending;
    if (s == "Active") return ExecStatus::Active;
    if (s == "Suspended") return ExecStatus::Suspended;
    if (s == "Aborting") return ExecStatus::Aborting;
    if (s == "Aborted") return ExecStatus::Aborted;
    if (s == "Succeeded") return ExecStatus::Succeeded;
    if (s == "Failed") return ExecStatus::Failed;
    throw std::invalid_argument("unknown exec status: " + std::string(s));
}

HealthStatus health_status_from_string(std::string_view s) {
    if (s == "Functional") return HealthStatus::Functional;
    if (s == "Suspect") return HealthStatus::Suspect;
    if (s == "Deprecated") return HealthStatus::Deprecated;
    throw std::invalid_argument("unknown health status: " + std::string(s));
}

}  // namespace sam
