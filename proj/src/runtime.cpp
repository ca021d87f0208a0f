#include "sam/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "sam/learner.hpp"

namespace sam::runtime {

using nlohmann::json;

namespace {

json lit_to_json(const Literal& l) {
    json j = {{"pred", l.predicate}, {"args", l.args}};
    if (!l.positive) j["neg"] = true;
    return j;
}

Literal lit_from_json(const json& j) {
    Literal l;
    l.predicate = j.at("pred").get<std::string>();
    l.args = j.value("args", std::vector<std::string>{});
    l.positive = !j.value("neg", false);
    return l;
}

json lits_to_json(const std::set<Literal>& ls) {
    json arr = json::array();
    for (const auto& l : ls) arr.push_back(lit_to_json(l));
    return arr;
}

json num_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

double num_from(const json& j, double fallback) {
    return j.is_null() ? fallback : j.get<double>();
}

using RouteKey = std::pair<std::string, std::string>;
using Route = std::vector<RouteKey>;  // legs as (from, to)

struct Runner {
    RunOptions opts;
    sim::Scenario sc;
    sim::WorldModel world;
    bdi::AgentState agent;
    std::shared_ptr<SelfModel> model;
    std::vector<std::pair<std::string, std::string>> objects;  // (symbol, type)
    RunReport report;
    std::vector<json> trace;
    std::vector<ActionCommand> pending;
    double initial_energy = 0;
    std::optional<int> finished;
    uint64_t probe_seq = 1;

    // a Failed mid-transit action is aborted first; the response (re-attempt
    // or repair) waits for the environment's abort_complete
    struct PendingRecovery {
        uint64_t intention_id = 0;
        FailureClassification cls = FailureClassification::Anomalous;
    };
    std::map<std::string, PendingRecovery> awaiting_abort;  // action_id ->

    // learned composite actions execute as a scripted sequence of primitive
    // legs under the original monitored record
    std::map<RouteKey, Route> learned_routes;
    struct Composite {
        std::string action_id;
        Route legs;
        size_t next = 0;
    };
    std::optional<Composite> composite;

    // recovery-probe session: drive the detour route out and back, collect
    // one execution trace per direction, synthesize a replacement description
    struct ProbeSession {
        uint64_t intention_id = 0;
        std::string name;
        Route legs_out;
        int phase = 0;  // 0 outbound, 1 inbound
        bool phase_started = false;
        Route legs;
        size_t done_legs = 0;
        std::vector<std::string> phase_args;
        State pre_state;
        uint64_t start_clock = 0;
        double start_energy = 0;
        std::vector<learner::ExecutionTrace> traces;
    };
    std::optional<ProbeSession> probe;

    void emit(const std::string& kind, json payload) {
        trace.push_back({{"tick", world.clock}, {"kind", kind}, {"payload", std::move(payload)}});
    }

    void emit_percept(const bdi::Percepts& p, const std::vector<sim::Event>& events) {
        json jl = json::array();
        for (const auto& l : p.literals) jl.push_back(lit_to_json(l));
        json je = json::array();
        for (const auto& e : events)
            je.push_back({{"kind", e.kind}, {"action_id", e.action_id}, {"detail", e.detail}});
        emit("Percept", {{"literals", jl}, {"fluents", p.fluents}, {"events", je}});
    }

    void emit_start_command(const ActionCommand& cmd, const ActionExecutionRecord& rec) {
        emit("Command", {{"action_id", cmd.action_id},
                         {"name", cmd.name},
                         {"args", cmd.args},
                         {"op", "start"},
                         {"probe", false},
                         {"version", rec.version},
                         {"start_tick", rec.start_tick},
                         {"d_max", num_or_null(rec.d_max)},
                         {"e_max", num_or_null(rec.e_max)},
                         {"energy_at_start", rec.energy_at_start},
                         {"expected_adds", lits_to_json(rec.expected_adds)},
                         {"expected_deletes", lits_to_json(rec.expected_deletes)}});
    }

    void emit_probe_command(const ActionCommand& cmd) {
        emit("Command", {{"action_id", cmd.action_id},
                         {"name", cmd.name},
                         {"args", cmd.args},
                         {"op", "start"},
                         {"probe", true}});
    }

    void emit_health(const std::string& name) {
        const ActionDescription* d = model->current(name);
        if (!d) return;
        json w = json::array();
        for (Outcome o : d->outcome_window) w.push_back(std::string(to_string(o)));
        emit("Health", {{"name", name},
                        {"version", d->version},
                        {"health", std::string(to_string(d->health))},
                        {"window", w}});
    }

    void emit_plan(const std::string& kind, const std::vector<planner::GroundAction>& steps,
                   double cost) {
        json js = json::array();
        for (const auto& s : steps)
            js.push_back({{"name", s.name}, {"version", s.version}, {"args", s.args}});
        emit("Plan", {{"kind", kind}, {"cost", cost}, {"steps", js}});
    }

    bdi::Intention* owner_of(const std::string& action_id) {
        for (auto& i : agent.intentions)
            if (i.active_action && i.active_action->action_id == action_id) return &i;
        return nullptr;
    }

    void retract_edge(const std::string& a, const std::string& b) {
        agent.beliefs.literals.erase({"edge", {a, b}, true});
        agent.beliefs.literals.erase({"edge", {b, a}, true});
    }

    void fail_intention(bdi::Intention& intn) {
        intn.status = ExecStatus::Failed;
        for (auto& [g, s] : agent.goals)
            if (g == intn.goal) s = ExecStatus::Failed;
        intn.active_action.reset();
        intn.needs_reconfiguration = false;
        intn.held = false;
    }

    std::optional<std::vector<planner::GroundAction>> ground_remaining(
        const bdi::Intention& intn) {
        std::vector<planner::GroundAction> plan;
        for (size_t i = intn.pc; i < intn.plan.body.size(); ++i) {
            const bdi::Step& st = intn.plan.body[i];
            if (st.kind != bdi::Step::Kind::Act) return std::nullopt;
            const ActionDescription* d = model->current(st.name);
            if (!d) return std::nullopt;
            plan.push_back(planner::ground_action(*d, st.args));
        }
        return plan;
    }

    void install_patch(bdi::Intention& intn, const std::vector<planner::GroundAction>& steps) {
        if (opts.safety) {
            auto sres = planner::check_safety(steps, agent.beliefs, *opts.safety);
            json ov = json::array();
            for (bool b : sres.outcome_vector) ov.push_back(b);
            emit("Safety", {{"certified", sres.certified}, {"outcome_vector", ov}});
            if (!sres.certified) {
                report.mission_outcome = "SafetyViolation";
                finished = 3;
                return;
            }
        }
        std::vector<bdi::Step> body(intn.plan.body.begin(), intn.plan.body.begin() + intn.pc);
        for (const auto& s : steps) {
            bdi::Step st;
            st.kind = bdi::Step::Kind::Act;
            st.name = s.name;
            st.args = s.args;
            body.push_back(std::move(st));
        }
        intn.plan.body = std::move(body);
        intn.active_action.reset();
        intn.needs_reconfiguration = false;
        intn.held = false;
    }

    void attempt_repair(bdi::Intention& intn) {
        auto plan = ground_remaining(intn);
        if (!plan || plan->empty()) {
            report.repairs.push_back({world.clock, planner::RepairKind::Unrepairable});
            fail_intention(intn);
            return;
        }
        std::optional<planner::Budget> budget;
        if (sc.budget) budget = planner::Budget{sc.budget->first, sc.budget->second};
        auto res = planner::repair_plan(*plan, 0, agent.beliefs, *model, objects, budget,
                                        opts.w_time, opts.w_energy);
        report.repairs.push_back({world.clock, res.kind});
        switch (res.kind) {
            case planner::RepairKind::Patched:
                emit_plan("repair", res.steps, res.sub_cost);
                install_patch(intn, res.steps);
                break;
            case planner::RepairKind::NeedLearning:
                if (!opts.learning || !start_learning(intn)) fail_intention(intn);
                break;
            case planner::RepairKind::Unrepairable:
                fail_intention(intn);
                break;
        }
    }

    void respond(bdi::Intention& intn, FailureClassification cls) {
        if (cls == FailureClassification::Anomalous) {
            // isolated failure: clear the record and re-attempt the same step
            intn.active_action.reset();
            intn.needs_reconfiguration = false;
            intn.held = false;
        } else {
            attempt_repair(intn);
        }
    }

    void handle_failure(const bdi::VerdictEvent& v) {
        bdi::Intention* intn = agent.find_intention(v.intention_id);
        if (!intn || !intn->active_action) return;
        model->record_outcome(v.name, Outcome::Failed, world.clock);
        emit_health(v.name);
        const ActionDescription* d = model->current(v.name);
        FailureClassification cls = classify_failure(d->outcome_window);
        report.failures.push_back({world.clock, v.action_id, v.verdict.reason, cls});
        if (world.active && world.active->action_id == v.action_id) {
            // physically in transit: abort and backtrack before responding
            ActionCommand ab{v.action_id, v.name, intn->active_action->args, world.clock,
                             ActionCommand::Op::Abort, false};
            emit("Command", {{"action_id", ab.action_id},
                             {"name", ab.name},
                             {"args", ab.args},
                             {"op", "abort"}});
            pending.push_back(std::move(ab));
            intn->held = true;
            awaiting_abort[v.action_id] = {v.intention_id, cls};
        } else {
            respond(*intn, cls);
        }
    }

    bool start_learning(bdi::Intention& intn) {
        const ActionExecutionRecord& rec = *intn.active_action;
        if (rec.args.size() != 2) return false;
        planner::PlanningProblem pp;
        pp.init = agent.beliefs;
        pp.goal = rec.expected_adds;
        pp.actions = planner::ground_actions(*model, objects);
        pp.w_time = opts.w_time;
        pp.w_energy = opts.w_energy;
        planner::PlanResult route;
        try {
            route = planner::solve(pp);
        } catch (const planner::Unsolvable&) {
            return false;
        }
        ProbeSession p;
        p.intention_id = intn.id;
        p.name = rec.name;
        for (const auto& s : route.steps) {
            if (s.args.size() != 2) return false;
            p.legs_out.push_back({s.args[0], s.args[1]});
        }
        p.legs = p.legs_out;
        p.phase_args = rec.args;
        probe = std::move(p);
        intn.held = true;
        drive_probe();
        return true;
    }

    bool leg_in_flight() const {
        return world.active ||
               std::any_of(pending.begin(), pending.end(),
                           [](const ActionCommand& c) { return c.probe; });
    }

    void drive_probe() {
        if (!probe || leg_in_flight()) return;
        ProbeSession& p = *probe;
        if (!p.phase_started) {
            p.pre_state = sim::snapshot(world);
            p.start_clock = world.clock;
            p.start_energy = world.energy;
            p.phase_started = true;
        }
        if (p.done_legs < p.legs.size()) {
            issue_leg(p.legs[p.done_legs]);
            ++p.done_legs;
            return;
        }
        learner::ExecutionTrace t;
        t.name = p.name;
        t.args = p.phase_args;
        t.pre_state = p.pre_state;
        t.post_state = sim::snapshot(world);
        t.duration = static_cast<double>(world.clock - p.start_clock);
        t.energy = p.start_energy - world.energy;
        t.outcome = Outcome::Succeeded;
        t.trace_id = "recovery-" + std::to_string(p.phase + 1);
        p.traces.push_back(std::move(t));
        if (p.phase == 0) {
            p.phase = 1;
            Route back;
            for (auto it = p.legs_out.rbegin(); it != p.legs_out.rend(); ++it)
                back.push_back({it->second, it->first});
            p.legs = std::move(back);
            p.phase_args = {p.phase_args[1], p.phase_args[0]};
            p.done_legs = 0;
            p.phase_started = false;
            drive_probe();
        } else {
            finish_learning();
        }
    }

    void issue_leg(const RouteKey& leg) {
        ActionCommand cmd{"p" + std::to_string(probe_seq++), "move", {leg.first, leg.second},
                          world.clock, ActionCommand::Op::Start, true};
        emit_probe_command(cmd);
        pending.push_back(std::move(cmd));
    }

    void finish_learning() {
        ProbeSession p = std::move(*probe);
        probe.reset();
        bdi::Intention* intn = agent.find_intention(p.intention_id);
        if (!intn) return;
        learner::LearnedDescription learned;
        try {
            learned = learner::synthesize_description(p.name, p.traces, *model);
        } catch (const std::exception&) {
            fail_intention(*intn);
            return;
        }
        model->replace_description(p.name, learned.description);
        emit("Learn", {{"name", p.name},
                       {"version", learned.description.version},
                       {"support", learned.support},
                       {"d_max", learned.description.d_max},
                       {"e_max", learned.description.e_max}});
        emit_health(p.name);
        report.learned.push_back({p.name, learned.description.version});
        const auto& a0 = intn->active_action->args;
        learned_routes[{a0[0], a0[1]}] = p.legs_out;
        Route back;
        for (auto it = p.legs_out.rbegin(); it != p.legs_out.rend(); ++it)
            back.push_back({it->second, it->first});
        learned_routes[{a0[1], a0[0]}] = std::move(back);

        // reconfiguration was over budget; with the learned description the
        // budget constraint no longer applies
        auto plan = ground_remaining(*intn);
        if (!plan || plan->empty()) {
            fail_intention(*intn);
            return;
        }
        auto res = planner::repair_plan(*plan, 0, agent.beliefs, *model, objects, std::nullopt,
                                        opts.w_time, opts.w_energy);
        report.repairs.push_back({world.clock, res.kind});
        if (res.kind == planner::RepairKind::Patched) {
            emit_plan("replan", res.steps, res.sub_cost);
            install_patch(*intn, res.steps);
        } else {
            fail_intention(*intn);
        }
    }

    void drive_composite() {
        if (!composite || leg_in_flight()) return;
        if (composite->next < composite->legs.size()) {
            issue_leg(composite->legs[composite->next]);
            ++composite->next;
        } else {
            composite.reset();
        }
    }

    void dispatch_command(const ActionCommand& cmd) {
        bdi::Intention* owner = owner_of(cmd.action_id);
        if (owner && cmd.op == ActionCommand::Op::Start && owner->active_action->version > 1) {
            auto it = learned_routes.find({cmd.args.size() == 2 ? cmd.args[0] : "",
                                           cmd.args.size() == 2 ? cmd.args[1] : ""});
            if (it != learned_routes.end()) {
                emit_start_command(cmd, *owner->active_action);
                composite = Composite{cmd.action_id, it->second, 0};
                drive_composite();
                return;
            }
        }
        if (owner)
            emit_start_command(cmd, *owner->active_action);
        else
            emit_probe_command(cmd);
        pending.push_back(cmd);
    }

    void on_event(const sim::Event& e) {
        if (e.kind == "departure_blocked") {
            bdi::Intention* intn = owner_of(e.action_id);
            if (intn) {
                ActionExecutionRecord& rec = *intn->active_action;
                rec.permanent_contradictions = rec.expected_deletes;
                if (rec.args.size() == 2) retract_edge(rec.args[0], rec.args[1]);
            }
        } else if (e.kind == "abort_complete") {
            auto it = awaiting_abort.find(e.action_id);
            if (it == awaiting_abort.end()) return;
            PendingRecovery pr = it->second;
            awaiting_abort.erase(it);
            bdi::Intention* intn = agent.find_intention(pr.intention_id);
            if (intn) {
                intn->held = false;
                respond(*intn, pr.cls);
            }
        }
    }

    void check_done() {
        if (finished) return;
        State snap = sim::snapshot(world);
        bool achieved = !sc.goal.empty() &&
                        std::all_of(sc.goal.begin(), sc.goal.end(),
                                    [&](const Literal& l) { return snap.holds(l); });
        if (achieved) {
            report.mission_outcome = "Achieved";
            finished = 0;
            return;
        }
        bool all_terminal = !agent.goals.empty() &&
                            std::all_of(agent.goals.begin(), agent.goals.end(),
                                        [](const auto& g) { return is_terminal(g.second); });
        if (all_terminal && !probe && awaiting_abort.empty()) {
            report.mission_outcome = "Failed";
            finished = 1;
        }
    }

    void step() {
        auto tr = sim::tick(world, pending);
        world = tr.world;
        pending.clear();
        emit_percept(tr.percepts, tr.events);

        auto res = bdi::deliberate(agent, tr.percepts);
        agent = std::move(res.agent);

        for (const auto& e : tr.events) on_event(e);

        for (const auto& v : res.verdicts) {
            if (v.verdict.status == ExecStatus::Active) continue;
            emit("Verdict", {{"action_id", v.action_id},
                             {"name", v.name},
                             {"version", v.version},
                             {"intention", v.intention_id},
                             {"status", std::string(to_string(v.verdict.status))},
                             {"reason", std::string(to_string(v.verdict.reason))}});
            if (v.verdict.status == ExecStatus::Succeeded) {
                model->record_outcome(v.name, Outcome::Succeeded, world.clock);
                emit_health(v.name);
            } else if (v.verdict.status == ExecStatus::Failed) {
                handle_failure(v);
            }
        }

        drive_probe();
        drive_composite();

        for (const auto& cmd : res.commands) dispatch_command(cmd);
        check_done();
    }

    RunResult run() {
        initial_energy = world.energy;
        emit_percept(bootstrap_percepts(), {});
        while (!finished && world.clock < opts.tick_limit) step();
        if (!finished) {
            report.mission_outcome = "Failed";
            finished = 1;
        }
        report.ticks_elapsed = world.clock;
        report.energy_used = initial_energy - world.energy;
        for (const auto& [name, versions] : model->actions) {
            const ActionDescription* d = model->current(name);
            if (d) report.final_health[name] = {d->health, d->version};
        }
        RunResult out;
        out.exit_code = *finished;
        out.report = std::move(report);
        for (const auto& rec : trace) out.trace_lines.push_back(rec.dump());
        out.model = *model;
        return out;
    }

    bdi::Percepts bootstrap_percepts() const {
        bdi::Percepts p;
        State snap = sim::snapshot(world);
        for (const auto& l : snap.literals) p.literals.push_back(l);
        for (const auto& e : world.edges) {
            p.literals.push_back({"edge", {e.a, e.b}, true});
            p.literals.push_back({"edge", {e.b, e.a}, true});
        }
        p.fluents = snap.fluents;
        return p;
    }
};

}  // namespace

RunResult run_scenario(const pddl::DomainDocument& domain,
                       const std::vector<bdi::PlanRule>& plans, const sim::Scenario& scenario,
                       const RunOptions& options, const std::string& health_sidecar) {
    Runner r;
    r.opts = options;
    r.sc = scenario;
    r.world = scenario.world;
    r.model = std::make_shared<SelfModel>(pddl::model_from_domain(domain));
    if (!health_sidecar.empty()) pddl::apply_health_sidecar(*r.model, health_sidecar);

    for (const auto& w : r.world.waypoints) r.objects.push_back({w, "waypoint"});
    for (const auto& [s, w] : r.world.sample_at) r.objects.push_back({s, "sample"});

    r.agent.model = r.model;
    r.agent.plan_library = plans;
    for (const auto& g : scenario.goals) r.agent.goals.push_back({g, ExecStatus::Pending});
    {
        auto boot = r.bootstrap_percepts();
        r.agent.beliefs = bdi::update_beliefs({}, boot, r.agent.functional_predicates);
    }
    return r.run();
}

std::string report_to_json(const RunReport& report) {
    json j;
    j["mission_outcome"] = report.mission_outcome;
    j["ticks_elapsed"] = report.ticks_elapsed;
    j["energy_used"] = report.energy_used;
    json jf = json::array();
    for (const auto& f : report.failures)
        jf.push_back({{"tick", f.tick},
                      {"action_id", f.action_id},
                      {"reason", std::string(to_string(f.reason))},
                      {"classification", std::string(to_string(f.classification))}});
    j["failures"] = jf;
    json jr = json::array();
    for (const auto& r : report.repairs)
        jr.push_back({{"tick", r.tick}, {"kind", std::string(to_string(r.kind))}});
    j["repairs"] = jr;
    json jl = json::array();
    for (const auto& [name, version] : report.learned)
        jl.push_back({{"name", name}, {"version", version}});
    j["learned"] = jl;
    json jh = json::object();
    for (const auto& [name, hv] : report.final_health)
        jh[name] = {{"health", std::string(to_string(hv.first))}, {"version", hv.second}};
    j["final_health"] = jh;
    return j.dump(2) + "\n";
}

planner::SafetyProperty safety_from_json(const std::string& text) {
    json j = json::parse(text);
    planner::SafetyProperty props;
    for (const auto& jc : j.value("forbidden", json::array())) {
        planner::Conjunct c;
        for (const auto& jl : jc.value("literals", json::array()))
            c.literals.push_back(lit_from_json(jl));
        for (const auto& jn : jc.value("fluents", json::array()))
            c.fluents.push_back({jn.at("fluent").get<std::string>(),
                                 cmp_from_string(jn.at("cmp").get<std::string>()),
                                 jn.at("bound").get<double>()});
        props.forbidden.push_back(std::move(c));
    }
    return props;
}

namespace {

std::string verdict_line(uint64_t tick, const std::string& action_id, ExecStatus status,
                         VerdictReason reason) {
    std::ostringstream os;
    os << tick << ' ' << action_id << ' ' << to_string(status) << '/' << to_string(reason);
    return os.str();
}

}  // namespace

ReplayResult replay_trace(const std::string& trace_text) {
    ReplayResult out;
    State observed;
    std::map<std::string, ActionExecutionRecord> live;

    std::istringstream is(trace_text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        uint64_t tick = j.at("tick").get<uint64_t>();
        std::string kind = j.at("kind").get<std::string>();
        const json& p = j.at("payload");
        if (kind == "Percept") {
            bdi::Percepts pp;
            for (const auto& jl : p.value("literals", json::array()))
                pp.literals.push_back(lit_from_json(jl));
            for (const auto& [f, v] : p.value("fluents", json::object()).items())
                pp.fluents[f] = v.get<double>();
            observed = bdi::update_beliefs(observed, pp, {"at"});
            for (const auto& je : p.value("events", json::array())) {
                if (je.value("kind", "") != "departure_blocked") continue;
                auto it = live.find(je.value("action_id", ""));
                if (it != live.end())
                    it->second.permanent_contradictions = it->second.expected_deletes;
            }
            for (auto it = live.begin(); it != live.end();) {
                MonitorVerdict v = monitor(it->second, observed, tick);
                if (v.status != ExecStatus::Active) {
                    out.regenerated.push_back(
                        verdict_line(tick, it->first, v.status, v.reason));
                    it = live.erase(it);
                } else {
                    ++it;
                }
            }
        } else if (kind == "Command") {
            if (p.value("op", "") != "start" || p.value("probe", false)) continue;
            ActionExecutionRecord rec;
            rec.action_id = p.at("action_id").get<std::string>();
            rec.name = p.at("name").get<std::string>();
            rec.version = p.value("version", 1);
            rec.args = p.value("args", std::vector<std::string>{});
            rec.start_tick = p.at("start_tick").get<uint64_t>();
            rec.d_max = num_from(p.at("d_max"), std::numeric_limits<double>::infinity());
            rec.e_max = num_from(p.at("e_max"), std::numeric_limits<double>::infinity());
            rec.energy_at_start = p.at("energy_at_start").get<double>();
            for (const auto& jl : p.value("expected_adds", json::array()))
                rec.expected_adds.insert(lit_from_json(jl));
            for (const auto& jl : p.value("expected_deletes", json::array()))
                rec.expected_deletes.insert(lit_from_json(jl));
            rec.status = ExecStatus::Active;
            live[rec.action_id] = std::move(rec);
        } else if (kind == "Verdict") {
            out.recorded.push_back(verdict_line(
                tick, p.at("action_id").get<std::string>(),
                exec_status_from_string(p.at("status").get<std::string>()),
                verdict_reason_from_string(p.at("reason").get<std::string>())));
        }
    }

    size_t n = std::max(out.recorded.size(), out.regenerated.size());
    for (size_t i = 0; i < n; ++i) {
        std::string a = i < out.recorded.size() ? out.recorded[i] : "<missing>";
        std::string b = i < out.regenerated.size() ? out.regenerated[i] : "<missing>";
        if (a != b) out.mismatches.push_back("recorded: " + a + " | regenerated: " + b);
    }
    out.ok = out.mismatches.empty();
    return out;
}

}  // namespace sam::runtime
