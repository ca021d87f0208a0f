#include "sam/sim.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace sam::sim {

using nlohmann::json;

namespace {

std::pair<std::string, std::string> norm(const std::string& a, const std::string& b) {
    return {std::min(a, b), std::max(a, b)};
}

Literal at_lit(const std::string& w, bool positive = true) {
    return {"at", {"rover", w}, positive};
}

}  // namespace

const Edge* WorldModel::find_edge(const std::string& a, const std::string& b) const {
    for (const Edge& e : edges)
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return &e;
    return nullptr;
}

bool WorldModel::is_blocked(const std::string& a, const std::string& b) const {
    return blocked.count(norm(a, b)) > 0;
}

WorldModel inject_fault(const WorldModel& world, const Fault& fault) {
    if (!world.find_edge(fault.a, fault.b)) throw UnknownEdge(fault.a, fault.b);
    WorldModel out = world;
    out.scheduled.push_back(fault);
    return out;
}

State snapshot(const WorldModel& world) {
    State s;
    if (!world.rover_at.empty()) s.literals.insert(at_lit(world.rover_at));
    for (const auto& [sample, wp] : world.sample_at)
        s.literals.insert({"sample_at", {sample, wp}, true});
    for (const auto& sample : world.carried) s.literals.insert({"have_sample", {sample}, true});
    for (const auto& sample : world.analysed) s.literals.insert({"analysed", {sample}, true});
    s.fluents["energy"] = world.energy;
    s.fluents["clock"] = static_cast<double>(world.clock);
    return s;
}

namespace {

void start_command(WorldModel& w, const ActionCommand& cmd, TickResult& res) {
    if (cmd.op == ActionCommand::Op::Abort) {
        if (!w.active || w.active->action_id != cmd.action_id) {
            res.events.push_back({"invalid_command", cmd.action_id, "no such activity to abort"});
            return;
        }
        Activity& act = *w.active;
        if (act.name == "move" && w.rover_at.empty()) {
            act.backtracking = true;
            act.remaining = act.travelled;
            if (act.remaining == 0) {
                w.rover_at = act.from;
                res.percepts.literals.push_back(at_lit(act.from));
                res.events.push_back({"abort_complete", act.action_id, act.from});
                w.active.reset();
            }
        } else {
            res.events.push_back({"abort_complete", act.action_id, w.rover_at});
            w.active.reset();
        }
        return;
    }

    if (w.active) {
        res.events.push_back({"command_while_busy", cmd.action_id, cmd.name});
        return;
    }

    if (cmd.name == "move") {
        if (cmd.args.size() != 2 || w.rover_at != cmd.args[0]) {
            res.events.push_back({"invalid_command", cmd.action_id, "rover not at origin"});
            return;
        }
        const Edge* e = w.find_edge(cmd.args[0], cmd.args[1]);
        if (!e) {
            res.events.push_back({"invalid_command", cmd.action_id, "no such edge"});
            return;
        }
        if (w.is_blocked(cmd.args[0], cmd.args[1])) {
            // departure refused; the rover observably stays where it is
            res.events.push_back({"departure_blocked", cmd.action_id,
                                  cmd.args[0] + "-" + cmd.args[1]});
            return;
        }
        Activity act;
        act.action_id = cmd.action_id;
        act.name = "move";
        act.args = cmd.args;
        act.from = cmd.args[0];
        act.to = cmd.args[1];
        act.remaining = e->length;
        act.energy_rate = e->energy_rate;
        w.active = std::move(act);
        w.rover_at.clear();
        res.percepts.literals.push_back(at_lit(cmd.args[0], false));
        return;
    }

    if (cmd.name == "scoop") {
        if (cmd.args.size() != 2 || w.rover_at != cmd.args[1] ||
            w.sample_at.count(cmd.args[0]) == 0 || w.sample_at.at(cmd.args[0]) != cmd.args[1]) {
            res.events.push_back({"invalid_command", cmd.action_id, "scoop preconditions"});
            return;
        }
        Activity act;
        act.action_id = cmd.action_id;
        act.name = "scoop";
        act.args = cmd.args;
        act.remaining = w.scoop_duration;
        act.energy_rate = w.activity_energy_rate;
        w.active = std::move(act);
        return;
    }

    if (cmd.name == "analyse") {
        if (cmd.args.size() != 2 || w.rover_at != cmd.args[1] || !w.carried.count(cmd.args[0])) {
            res.events.push_back({"invalid_command", cmd.action_id, "analyse preconditions"});
            return;
        }
        Activity act;
        act.action_id = cmd.action_id;
        act.name = "analyse";
        act.args = cmd.args;
        act.remaining = w.analyse_duration;
        act.energy_rate = w.activity_energy_rate;
        w.active = std::move(act);
        return;
    }

    res.events.push_back({"invalid_command", cmd.action_id, "unknown action " + cmd.name});
}

void advance_activity(WorldModel& w, TickResult& res) {
    if (!w.active) return;
    Activity& act = *w.active;

    if (act.name == "move") {
        if (act.backtracking) {
            w.energy -= act.energy_rate;
            --act.remaining;
            if (act.remaining <= 0) {
                w.rover_at = act.from;
                res.percepts.literals.push_back(at_lit(act.from));
                res.events.push_back({"abort_complete", act.action_id, act.from});
                w.active.reset();
            }
            return;
        }
        w.energy -= act.energy_rate;  // drains even while stalled
        if (w.is_blocked(act.from, act.to)) return;
        --act.remaining;
        ++act.travelled;
        if (act.remaining <= 0) {
            w.rover_at = act.to;
            res.percepts.literals.push_back(at_lit(act.to));
            res.events.push_back({"completed", act.action_id, act.to});
            w.active.reset();
        }
        return;
    }

    w.energy -= act.energy_rate;
    --act.remaining;
    if (act.remaining > 0) return;
    if (act.name == "scoop") {
        const std::string& sample = act.args[0];
        const std::string& wp = act.args[1];
        w.sample_at.erase(sample);
        w.carried.insert(sample);
        res.percepts.literals.push_back({"sample_at", {sample, wp}, false});
        res.percepts.literals.push_back({"have_sample", {sample}, true});
    } else if (act.name == "analyse") {
        w.analysed.insert(act.args[0]);
        res.percepts.literals.push_back({"analysed", {act.args[0]}, true});
    }
    res.events.push_back({"completed", act.action_id, ""});
    w.active.reset();
}

void activate_faults(WorldModel& w, TickResult& res) {
    std::vector<Fault> remaining;
    for (const Fault& f : w.scheduled) {
        if (f.at_tick > w.clock) {
            remaining.push_back(f);
            continue;
        }
        if (f.kind == Fault::Kind::BlockEdge) {
            w.blocked.insert(norm(f.a, f.b));  // idempotent
            res.events.push_back({"fault_activated", "", "block " + f.a + "-" + f.b});
        } else {
            bool applied_to_transit = false;
            if (w.active && w.active->name == "move" && !w.active->backtracking) {
                auto e = norm(w.active->from, w.active->to);
                if (e == norm(f.a, f.b)) {
                    w.active->remaining = static_cast<int>(
                        std::ceil(w.active->remaining * f.factor));
                    applied_to_transit = true;
                }
            }
            if (!applied_to_transit) {
                for (Edge& e : w.edges)
                    if (norm(e.a, e.b) == norm(f.a, f.b))
                        e.length = static_cast<int>(std::ceil(e.length * f.factor));
            }
            res.events.push_back({"fault_activated", "", "degrade " + f.a + "-" + f.b});
        }
    }
    w.scheduled = std::move(remaining);
}

}  // namespace

TickResult tick(const WorldModel& world, const std::vector<ActionCommand>& commands) {
    TickResult res;
    res.world = world;
    WorldModel& w = res.world;
    ++w.clock;

    for (const ActionCommand& cmd : commands) start_command(w, cmd, res);
    advance_activity(w, res);
    activate_faults(w, res);

    res.percepts.fluents["energy"] = w.energy;
    res.percepts.fluents["clock"] = static_cast<double>(w.clock);
    return res;
}

Scenario scenario_from_json(const std::string& text) {
    json j = json::parse(text);
    Scenario sc;
    WorldModel& w = sc.world;
    for (const auto& wp : j.at("waypoints")) w.waypoints.insert(wp.get<std::string>());
    for (const auto& je : j.at("edges")) {
        Edge e;
        e.a = je.at("a").get<std::string>();
        e.b = je.at("b").get<std::string>();
        e.length = je.at("length").get<int>();
        e.energy_rate = je.value("energy", 1.0);
        if (!w.waypoints.count(e.a) || !w.waypoints.count(e.b))
            throw std::invalid_argument("edge endpoint not a declared waypoint");
        w.edges.push_back(std::move(e));
    }
    w.rover_at = j.at("rover_start").get<std::string>();
    if (!w.waypoints.count(w.rover_at))
        throw std::invalid_argument("rover_start not a declared waypoint");
    if (j.contains("samples"))
        for (const auto& [sample, wp] : j.at("samples").items())
            w.sample_at[sample] = wp.get<std::string>();
    w.energy = j.value("initial_energy", 100.0);
    w.scoop_duration = j.value("scoop_duration", 2);
    w.analyse_duration = j.value("analyse_duration", 3);
    for (const auto& jl : j.value("goal", json::array()))
        sc.goal.insert({jl.at("pred").get<std::string>(),
                        jl.value("args", std::vector<std::string>{}), true});
    for (const auto& jg : j.value("goals", json::array()))
        sc.goals.push_back({jg.at("name").get<std::string>(),
                            jg.value("args", std::vector<std::string>{})});
    for (const auto& jf : j.value("faults", json::array())) {
        Fault f;
        std::string kind = jf.at("kind").get<std::string>();
        if (kind == "block")
            f.kind = Fault::Kind::BlockEdge;
        else if (kind == "degrade")
            f.kind = Fault::Kind::DegradeEdge;
        else
            throw std::invalid_argument("unknown fault kind: " + kind);
        f.a = jf.at("a").get<std::string>();
        f.b = jf.at("b").get<std::string>();
        f.factor = jf.value("factor", 1.0);
        f.at_tick = jf.at("at_tick").get<uint64_t>();
        sc.world = inject_fault(sc.world, f);
    }
    if (j.contains("budgets"))
        sc.budget = {{j.at("budgets").value("time", 0.0), j.at("budgets").value("energy", 0.0)}};
    sc.seed = j.value("seed", uint64_t{0});
    return sc;
}

}  // namespace sam::sim
