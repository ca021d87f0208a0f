#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sam {

/// Agent-to-environment message. Value type; no shared state crosses the
/// boundary.
struct ActionCommand {
    enum class Op { Start, Abort };

    std::string action_id;
    std::string name;
    std::vector<std::string> args;
    uint64_t issued_tick = 0;
    Op op = Op::Start;
    bool probe = false;  // instrumented learning probe, not a monitored action

    auto operator<=>(const ActionCommand&) const = default;
};

}  // namespace sam
