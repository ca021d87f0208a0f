#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sam {

/// Execution status of a running action or goal.
/// Aborted, Succeeded and Failed are terminal.
enum class ExecStatus { Pending, Active, Suspended, Aborting, Aborted, Succeeded, Failed };

/// Health status of an action description. Deprecated is absorbing.
enum class HealthStatus { Functional, Suspect, Deprecated };

enum class ExecEvent {
    Start,
    SuccessObserved,
    FailureObserved,
    SuspendRequest,
    ResumeRequest,
    AbortRequest,
    AbortComplete
};

enum class HealthEvent { PersistentFailure, RepeatedFailure, RecoveryObserved };

struct IllegalTransition : std::logic_error {
    IllegalTransition(std::string state, std::string event)
        : std::logic_error("illegal transition: " + state + " + " + event),
          state(std::move(state)),
          event(std::move(event)) {}
    std::string state;
    std::string event;
};

/// Transition table:
///   Pending   + Start           -> Active
///   Active    + SuccessObserved -> Succeeded
///   Active    + FailureObserved -> Failed
///   Active    + SuspendRequest  -> Suspended
///   Suspended + ResumeRequest   -> Active
///   Active    + AbortRequest    -> Aborting
///   Suspended + AbortRequest    -> Aborting
///   Aborting  + AbortComplete   -> Aborted
/// Everything else throws IllegalTransition.
ExecStatus step_exec(ExecStatus status, ExecEvent event);

///   Functional + PersistentFailure -> Suspect
///   Suspect    + RepeatedFailure   -> Deprecated
///   Suspect    + RecoveryObserved  -> Functional
HealthStatus step_health(HealthStatus health, HealthEvent event);

bool is_terminal(ExecStatus status);

std::string_view to_string(ExecStatus s);
std::string_view to_string(HealthStatus s);
std::string_view to_string(ExecEvent e);
std::string_view to_string(HealthEvent e);

ExecStatus exec_status_from_string(std::string_view s);
HealthStatus health_status_from_string(std::string_view s);

}  // namespace sam
