#include "sam/bdi.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace sam::bdi {

using nlohmann::json;

std::string Goal::str() const {
    std::ostringstream os;
    os << name << '(';
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) os << ',';
        os << args[i];
    }
    os << ')';
    return os.str();
}

Intention* AgentState::find_intention(uint64_t id) {
    for (auto& i : intentions)
        if (i.id == id) return &i;
    return nullptr;
}

const Intention* AgentState::find_intention(uint64_t id) const {
    for (const auto& i : intentions)
        if (i.id == id) return &i;
    return nullptr;
}

State update_beliefs(const State& beliefs, const Percepts& percepts,
                     const std::set<std::string>& functional_predicates) {
    State out = beliefs;
    for (const Literal& p : percepts.literals) {
        if (!p.positive) {
            out.literals.erase(p.negated());
            continue;
        }
        if (functional_predicates.count(p.predicate) && !p.args.empty()) {
            // single-valued per first argument: replace the old value
            for (auto it = out.literals.begin(); it != out.literals.end();) {
                if (it->predicate == p.predicate && !it->args.empty() &&
                    it->args[0] == p.args[0])
                    it = out.literals.erase(it);
                else
                    ++it;
            }
        }
        out.literals.insert(p);
    }
    for (const auto& [f, v] : percepts.fluents) out.fluents[f] = v;
    return out;
}

namespace {

std::optional<Binding> unify_goal(const Goal& trigger, const Goal& goal) {
    if (trigger.name != goal.name || trigger.args.size() != goal.args.size())
        return std::nullopt;
    Binding b;
    for (size_t i = 0; i < trigger.args.size(); ++i) {
        const std::string& t = trigger.args[i];
        const std::string& g = goal.args[i];
        if (is_variable(t)) {
            auto it = b.find(t);
            if (it == b.end())
                b[t] = g;
            else if (it->second != g)
                return std::nullopt;
        } else if (t != g) {
            return std::nullopt;
        }
    }
    return b;
}

bool match_literal(const Literal& pattern, const Literal& fact, Binding& b) {
    if (pattern.predicate != fact.predicate || pattern.args.size() != fact.args.size())
        return false;
    Binding local = b;
    for (size_t i = 0; i < pattern.args.size(); ++i) {
        std::string a = substitute(pattern.args[i], local);
        if (is_variable(a))
            local[a] = fact.args[i];
        else if (a != fact.args[i])
            return false;
    }
    b = std::move(local);
    return true;
}

bool binding_less(const Binding& a, const Binding& b) {
    // both bindings cover the same variables; compare values in name order
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return false;
}

/// All complete bindings satisfying the guard, pattern-matched against the
/// belief base; negatives and numeric constraints checked once bound.
void enumerate_guard(const std::vector<Literal>& positives, size_t i, const State& beliefs,
                     const std::vector<Literal>& negatives,
                     const std::vector<NumericConstraint>& nums, Binding b,
                     std::optional<Binding>& best) {
    if (i == positives.size()) {
        for (const Literal& n : negatives)
            if (beliefs.holds(substitute(n, b).negated())) return;
        for (const NumericConstraint& c : nums)
            if (!beliefs.holds(c)) return;
        if (!best || binding_less(b, *best)) best = b;
        return;
    }
    for (const Literal& fact : beliefs.literals) {
        Binding next = b;
        if (match_literal(positives[i], fact, next))
            enumerate_guard(positives, i + 1, beliefs, negatives, nums, std::move(next), best);
    }
}

Step substitute_step(const Step& s, const Binding& b) {
    Step out = s;
    for (auto& a : out.args) a = substitute(a, b);
    out.lit = substitute(out.lit, b);
    return out;
}

}  // namespace

PlanRule select_plan(const Goal& goal, const State& beliefs,
                     const std::vector<PlanRule>& library) {
    for (const PlanRule& rule : library) {
        auto b0 = unify_goal(rule.trigger, goal);
        if (!b0) continue;
        std::vector<Literal> positives, negatives;
        for (const Literal& l : rule.guard)
            (l.positive ? positives : negatives).push_back(l);
        std::optional<Binding> best;
        enumerate_guard(positives, 0, beliefs, negatives, rule.guard_num, *b0, best);
        if (!best) continue;
        PlanRule inst;
        inst.trigger = goal;
        for (const Literal& l : rule.guard) inst.guard.push_back(substitute(l, *best));
        inst.guard_num = rule.guard_num;
        for (const Step& s : rule.body) inst.body.push_back(substitute_step(s, *best));
        return inst;
    }
    throw NoApplicablePlan(goal.str());
}

namespace {

void mark_goal(AgentState& agent, const Goal& goal, ExecStatus status) {
    for (auto& [g, s] : agent.goals)
        if (g == goal) s = status;
}

void complete_child(AgentState& agent, Intention& child, DeliberationResult& result);

void intention_succeeded(AgentState& agent, Intention& intn, DeliberationResult& result) {
    intn.status = step_exec(ExecStatus::Active, ExecEvent::SuccessObserved);
    mark_goal(agent, intn.goal, ExecStatus::Succeeded);
    if (intn.parent) complete_child(agent, intn, result);
}

void intention_failed(AgentState& agent, Intention& intn, DeliberationResult& result,
                      const std::string& why) {
    intn.status = step_exec(ExecStatus::Active, ExecEvent::FailureObserved);
    mark_goal(agent, intn.goal, ExecStatus::Failed);
    result.diagnostics.push_back("goal " + intn.goal.str() + " failed: " + why);
    if (intn.parent) complete_child(agent, intn, result);
}

void complete_child(AgentState& agent, Intention& child, DeliberationResult& result) {
    Intention* parent = agent.find_intention(*child.parent);
    if (!parent || parent->waiting_child != child.id) return;
    parent->waiting_child.reset();
    if (child.status == ExecStatus::Succeeded) {
        ++parent->pc;
    } else if (!is_terminal(parent->status)) {
        intention_failed(agent, *parent, result, "subgoal " + child.goal.str() + " failed");
    }
}

}  // namespace

DeliberationResult deliberate(const AgentState& agent_in, const Percepts& percepts) {
    DeliberationResult result;
    result.agent = agent_in;
    AgentState& agent = result.agent;

    // (1) perceive
    agent.beliefs = update_beliefs(agent.beliefs, percepts, agent.functional_predicates);
    uint64_t tick = static_cast<uint64_t>(agent.beliefs.fluent("clock"));

    // (2) monitor active actions
    for (Intention& intn : agent.intentions) {
        if (!intn.active_action || intn.active_action->status != ExecStatus::Active) continue;
        ActionExecutionRecord& rec = *intn.active_action;
        MonitorVerdict v = monitor(rec, agent.beliefs, tick);
        result.verdicts.push_back({intn.id, rec.action_id, rec.name, rec.version, v});
        rec.status = v.status;
        rec.last_reason = v.reason;
        if (v.status == ExecStatus::Succeeded) {
            intn.status = step_exec(intn.status, ExecEvent::ResumeRequest);
            ++intn.pc;
            intn.active_action.reset();
        } else if (v.status == ExecStatus::Failed) {
            // route to reconfiguration; the record stays for the repair path
            intn.status = step_exec(intn.status, ExecEvent::ResumeRequest);
            intn.needs_reconfiguration = true;
        }
    }

    // adopt pending goals
    for (auto& [goal, status] : agent.goals) {
        if (status != ExecStatus::Pending) continue;
        try {
            PlanRule inst = select_plan(goal, agent.beliefs, agent.plan_library);
            Intention intn;
            intn.id = agent.next_intention_id++;
            intn.goal = goal;
            intn.plan = std::move(inst);
            agent.intentions.push_back(std::move(intn));
            status = ExecStatus::Active;
        } catch (const NoApplicablePlan& e) {
            status = ExecStatus::Failed;
            result.diagnostics.push_back(e.what());
        }
    }

    // (3) step each unblocked intention once
    for (size_t idx = 0; idx < agent.intentions.size(); ++idx) {
        Intention& intn = agent.intentions[idx];
        if (is_terminal(intn.status) || intn.status == ExecStatus::Suspended) continue;
        if (intn.needs_reconfiguration || intn.held) continue;
        if (intn.waiting_child) {
            Intention* child = agent.find_intention(*intn.waiting_child);
            if (child && is_terminal(child->status)) complete_child(agent, *child, result);
            if (intn.waiting_child || is_terminal(intn.status)) continue;
        }
        if (intn.pc >= intn.plan.body.size()) {
            intention_succeeded(agent, intn, result);
            continue;
        }
        const Step step = intn.plan.body[intn.pc];
        switch (step.kind) {
            case Step::Kind::Act: {
                const ActionDescription* desc = agent.model ? agent.model->current(step.name)
                                                            : nullptr;
                if (!desc) {
                    intention_failed(agent, intn, result, "unknown action " + step.name);
                    break;
                }
                Binding b;
                for (size_t i = 0; i < desc->params.size() && i < step.args.size(); ++i)
                    b[desc->params[i].first] = step.args[i];
                ActionExecutionRecord rec;
                rec.action_id = "a" + std::to_string(agent.next_action_seq++);
                rec.name = desc->name;
                rec.version = desc->version;
                rec.args = step.args;
                rec.start_tick = tick;
                for (const Literal& l : desc->adds) rec.expected_adds.insert(substitute(l, b));
                for (const Literal& l : desc->deletes)
                    rec.expected_deletes.insert(substitute(l, b));
                rec.d_max = desc->d_max;
                rec.e_max = desc->e_max;
                rec.energy_at_start = agent.beliefs.fluent("energy");
                rec.status = step_exec(ExecStatus::Pending, ExecEvent::Start);
                result.commands.push_back(
                    {rec.action_id, rec.name, rec.args, tick, ActionCommand::Op::Start, false});
                intn.active_action = std::move(rec);
                intn.status = step_exec(intn.status, ExecEvent::SuspendRequest);
                break;
            }
            case Step::Kind::AddBelief:
                agent.beliefs = update_beliefs(agent.beliefs, {{step.lit}, {}},
                                               agent.functional_predicates);
                ++intn.pc;
                break;
            case Step::Kind::DropBelief:
                agent.beliefs.literals.erase(step.lit);
                ++intn.pc;
                break;
            case Step::Kind::SubGoal: {
                Goal sub{step.name, step.args};
                try {
                    PlanRule inst = select_plan(sub, agent.beliefs, agent.plan_library);
                    Intention child;
                    child.id = agent.next_intention_id++;
                    child.goal = sub;
                    child.plan = std::move(inst);
                    child.parent = intn.id;
                    uint64_t child_id = child.id;
                    agent.intentions.push_back(std::move(child));
                    // vector may have reallocated; re-resolve
                    agent.intentions[idx].waiting_child = child_id;
                } catch (const NoApplicablePlan& e) {
                    intention_failed(agent, agent.intentions[idx], result, e.what());
                }
                break;
            }
        }
    }

    // (4) goals whose plan body completed this cycle
    for (Intention& intn : agent.intentions) {
        if (intn.status == ExecStatus::Active && !intn.waiting_child && !intn.active_action &&
            !intn.needs_reconfiguration && intn.pc >= intn.plan.body.size())
            intention_succeeded(agent, intn, result);
    }

    return result;
}

namespace {

Literal literal_from_json(const json& j) {
    Literal l;
    l.predicate = j.at("pred").get<std::string>();
    l.args = j.value("args", std::vector<std::string>{});
    l.positive = !j.value("neg", false);
    return l;
}

json literal_to_json(const Literal& l) {
    json j = {{"pred", l.predicate}, {"args", l.args}};
    if (!l.positive) j["neg"] = true;
    return j;
}

Goal goal_from_json(const json& j) {
    return {j.at("name").get<std::string>(), j.value("args", std::vector<std::string>{})};
}

}  // namespace

std::vector<PlanRule> plan_library_from_json(const std::string& text) {
    json doc = json::parse(text);
    std::vector<PlanRule> rules;
    for (const auto& jr : doc) {
        PlanRule r;
        r.trigger = goal_from_json(jr.at("trigger"));
        for (const auto& jg : jr.value("guard", json::array())) {
            if (jg.contains("fluent"))
                r.guard_num.push_back({jg.at("fluent").get<std::string>(),
                                       cmp_from_string(jg.at("cmp").get<std::string>()),
                                       jg.at("bound").get<double>()});
            else
                r.guard.push_back(literal_from_json(jg));
        }
        for (const auto& js : jr.at("body")) {
            Step s;
            if (js.contains("act")) {
                s.kind = Step::Kind::Act;
                s.name = js.at("act").get<std::string>();
                s.args = js.value("args", std::vector<std::string>{});
            } else if (js.contains("add")) {
                s.kind = Step::Kind::AddBelief;
                s.lit = literal_from_json(js.at("add"));
            } else if (js.contains("drop")) {
                s.kind = Step::Kind::DropBelief;
                s.lit = literal_from_json(js.at("drop"));
            } else if (js.contains("subgoal")) {
                s.kind = Step::Kind::SubGoal;
                Goal g = goal_from_json(js.at("subgoal"));
                s.name = g.name;
                s.args = g.args;
            } else {
                throw std::invalid_argument("unknown plan step: " + js.dump());
            }
            r.body.push_back(std::move(s));
        }
        rules.push_back(std::move(r));
    }
    return rules;
}

std::string plan_library_to_json(const std::vector<PlanRule>& rules) {
    json doc = json::array();
    for (const PlanRule& r : rules) {
        json jr;
        jr["trigger"] = {{"name", r.trigger.name}, {"args", r.trigger.args}};
        json guard = json::array();
        for (const Literal& l : r.guard) guard.push_back(literal_to_json(l));
        for (const NumericConstraint& c : r.guard_num)
            guard.push_back({{"fluent", c.fluent},
                             {"cmp", std::string(to_string(c.cmp))},
                             {"bound", c.bound}});
        jr["guard"] = guard;
        json body = json::array();
        for (const Step& s : r.body) {
            switch (s.kind) {
                case Step::Kind::Act: body.push_back({{"act", s.name}, {"args", s.args}}); break;
                case Step::Kind::AddBelief: body.push_back({{"add", literal_to_json(s.lit)}}); break;
                case Step::Kind::DropBelief:
                    body.push_back({{"drop", literal_to_json(s.lit)}});
                    break;
                case Step::Kind::SubGoal:
                    body.push_back({{"subgoal", {{"name", s.name}, {"args", s.args}}}});
                    break;
            }
        }
        jr["body"] = body;
        doc.push_back(std::move(jr));
    }
    return doc.dump(2) + "\n";
}

}  // namespace sam::bdi
