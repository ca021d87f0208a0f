#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sam/bdi.hpp"
#include "sam/command.hpp"
#include "sam/literal.hpp"

namespace sam::sim {

struct Edge {
    std::string a, b;
    int length = 1;          // ticks to traverse
    double energy_rate = 1;  // units per tick while moving

    auto operator<=>(const Edge&) const = default;
};

struct Fault {
    enum class Kind { BlockEdge, DegradeEdge };

    Kind kind = Kind::BlockEdge;
    std::string a, b;
    double factor = 1;  // DegradeEdge only, >= 1
    uint64_t at_tick = 0;

    auto operator<=>(const Fault&) const = default;
};

struct UnknownEdge : std::runtime_error {
    UnknownEdge(const std::string& a, const std::string& b)
        : std::runtime_error("unknown edge " + a + "-" + b) {}
};

/// Environment event, delivered inside the tick's percept bundle.
struct Event {
    std::string kind;  // fault_activated | departure_blocked | arrived | abort_complete |
                       // invalid_command | command_while_busy | completed
    std::string action_id;
    std::string detail;

    auto operator<=>(const Event&) const = default;
};

/// In-progress activity. Moves carry transit state; scoop/analyse just count
/// down.
struct Activity {
    std::string action_id;
    std::string name;
    std::vector<std::string> args;
    // movement
    std::string from, to;
    int remaining = 0;   // ticks left (forward or backtrack)
    int travelled = 0;   // ticks actually moved forward
    bool backtracking = false;
    double energy_rate = 0;
};

struct WorldModel {
    std::set<std::string> waypoints;
    std::vector<Edge> edges;  // undirected
    std::string rover_at;     // empty while in transit
    std::optional<Activity> active;
    std::map<std::string, std::string> sample_at;  // sample -> waypoint
    std::set<std::string> carried;
    std::set<std::string> analysed;
    double energy = 100;
    uint64_t clock = 0;
    std::vector<Fault> scheduled;                       // not yet active
    std::set<std::pair<std::string, std::string>> blocked;  // normalized (min,max)
    int scoop_duration = 2;
    int analyse_duration = 3;
    double activity_energy_rate = 1;  // scoop/analyse drain

    const Edge* find_edge(const std::string& a, const std::string& b) const;
    bool is_blocked(const std::string& a, const std::string& b) const;
};

struct TickResult {
    WorldModel world;
    bdi::Percepts percepts;
    std::vector<Event> events;
};

/// Advance the world one tick, starting any new commands first.
/// Movement on a blocked edge stalls (no progress) but keeps draining energy.
TickResult tick(const WorldModel& world, const std::vector<ActionCommand>& commands);

/// Schedule a fault; it activates when the clock reaches at_tick.
/// DegradeEdge multiplies the remaining length of an in-progress transit on
/// that edge once at activation (rounding up); with no transit active it
/// permanently multiplies the edge length.
WorldModel inject_fault(const WorldModel& world, const Fault& fault);

/// Ground snapshot: at/have_sample/analysed/sample_at literals plus
/// energy and clock fluents. No at(rover, _) literal while in transit.
State snapshot(const WorldModel& world);

/// Scenario file: {waypoints, edges, rover_start, samples, goal, goals,
/// faults, budgets, seed}.
struct Scenario {
    WorldModel world;
    std::set<Literal> goal;  // mission success condition
    std::vector<bdi::Goal> goals;  // goals posted to the agent
    std::optional<std::pair<double, double>> budget;  // (time, energy) for repair
    uint64_t seed = 0;  // reserved for stochastic extensions; dynamics are seed-independent
};

Scenario scenario_from_json(const std::string& text);

}  // namespace sam::sim
