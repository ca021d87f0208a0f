#include "sam/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

namespace sam::planner {

std::string_view to_string(RepairKind k) {
    switch (k) {
        case RepairKind::Patched: return "Patched";
        case RepairKind::NeedLearning: return "NeedLearning";
        case RepairKind::Unrepairable: return "Unrepairable";
    }
    return "?";
}

bool GroundAction::applicable(const State& s) const {
    for (const auto& l : pre)
        if (!s.holds(l)) return false;
    for (const auto& c : num_pre)
        if (!s.holds(c)) return false;
    return true;
}

State GroundAction::apply(const State& s) const {
    State out = s;
    for (const auto& l : deletes) out.literals.erase(l);
    for (const auto& l : adds) out.literals.insert(l);
    for (const auto& e : numeric_effects) out.fluents[e.fluent] += e.delta();
    return out;
}

std::string GroundAction::str() const {
    std::ostringstream os;
    os << name;
    for (const auto& a : args) os << ' ' << a;
    return os.str();
}

GroundAction ground_action(const ActionDescription& desc, const std::vector<std::string>& args) {
    if (args.size() != desc.params.size())
        throw std::invalid_argument(desc.name + ": arity mismatch");
    Binding b;
    for (size_t i = 0; i < args.size(); ++i) b[desc.params[i].first] = args[i];
    GroundAction g;
    g.name = desc.name;
    g.version = desc.version;
    g.args = args;
    for (const auto& l : desc.pre) g.pre.insert(substitute(l, b));
    g.num_pre = desc.num_pre;
    for (const auto& l : desc.adds) g.adds.insert(substitute(l, b));
    for (const auto& l : desc.deletes) g.deletes.insert(substitute(l, b));
    g.numeric_effects = desc.numeric_effects;
    g.d_min = desc.d_min;
    g.d_max = desc.d_max;
    g.e_min = desc.e_min;
    g.e_max = desc.e_max;
    return g;
}

std::vector<GroundAction> ground_actions(
    const SelfModel& model, const std::vector<std::pair<std::string, std::string>>& objects) {
    std::vector<GroundAction> out;
    for (const ActionDescription& desc : model.functional_actions()) {
        std::vector<std::vector<std::string>> candidates(desc.params.size());
        for (size_t i = 0; i < desc.params.size(); ++i)
            for (const auto& [sym, ty] : objects)
                if (ty == desc.params[i].second) candidates[i].push_back(sym);

        std::vector<std::string> binding(desc.params.size());
        auto distinct_ok = [&]() {
            for (const auto& [x, y] : desc.distinct) {
                auto idx = [&](const std::string& v) -> int {
                    for (size_t i = 0; i < desc.params.size(); ++i)
                        if (desc.params[i].first == v) return static_cast<int>(i);
                    return -1;
                };
                int ix = idx(x), iy = idx(y);
                if (ix >= 0 && iy >= 0 && binding[ix] == binding[iy]) return false;
            }
            return true;
        };
        auto rec = [&](auto&& self, size_t i) -> void {
            if (i == desc.params.size()) {
                if (distinct_ok()) out.push_back(ground_action(desc, binding));
                return;
            }
            for (const auto& sym : candidates[i]) {
                binding[i] = sym;
                self(self, i + 1);
            }
        };
        rec(rec, 0);
    }
    return out;
}

namespace {

double step_cost(const GroundAction& a, double w_time, double w_energy) {
    double e = std::isfinite(a.e_max) ? a.e_max : 0.0;
    return w_time * a.d_max + w_energy * e;
}

std::string state_key(const State& s) {
    std::ostringstream os;
    for (const auto& l : s.literals) os << l.str() << ';';
    os << '|';
    for (const auto& [f, v] : s.fluents) os << f << '=' << v << ';';
    return os.str();
}

bool goal_met(const State& s, const std::set<Literal>& goal) {
    return std::all_of(goal.begin(), goal.end(), [&](const Literal& l) { return s.holds(l); });
}

}  // namespace

PlanResult solve(const PlanningProblem& problem) {
    // actions sorted by (name, args) so plan index vectors compare
    // lexicographically in the required tie-break order
    std::vector<GroundAction> actions = problem.actions;
    std::sort(actions.begin(), actions.end(), [](const GroundAction& a, const GroundAction& b) {
        return a.name != b.name ? a.name < b.name : a.args < b.args;
    });

    struct Node {
        double cost;
        std::vector<size_t> plan;
        State state;
        bool operator>(const Node& o) const {
            if (cost != o.cost) return cost > o.cost;
            return plan > o.plan;
        }
    };

    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    open.push({0.0, {}, problem.init});
    // best (cost, plan) seen per state; re-expansion allowed on improvement
    std::map<std::string, std::pair<double, std::vector<size_t>>> best;
    best[state_key(problem.init)] = {0.0, {}};
    size_t expanded = 0;

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        auto bit = best.find(state_key(node.state));
        if (bit != best.end() &&
            (bit->second.first < node.cost ||
             (bit->second.first == node.cost && bit->second.second < node.plan)))
            continue;
        if (goal_met(node.state, problem.goal)) {
            PlanResult res;
            for (size_t i : node.plan) res.steps.push_back(actions[i]);
            res.cost = node.cost;
            res.expanded_nodes = expanded;
            return res;
        }
        ++expanded;
        for (size_t i = 0; i < actions.size(); ++i) {
            if (!actions[i].applicable(node.state)) continue;
            Node succ;
            succ.cost = node.cost + step_cost(actions[i], problem.w_time, problem.w_energy);
            succ.plan = node.plan;
            succ.plan.push_back(i);
            succ.state = actions[i].apply(node.state);
            std::string key = state_key(succ.state);
            auto it = best.find(key);
            if (it != best.end() &&
                (it->second.first < succ.cost ||
                 (it->second.first == succ.cost && it->second.second <= succ.plan)))
                continue;
            best[key] = {succ.cost, succ.plan};
            open.push(std::move(succ));
        }
    }
    throw Unsolvable();
}

ValidationResult validate_plan(const std::vector<GroundAction>& steps, const State& init) {
    State s = init;
    for (size_t i = 0; i < steps.size(); ++i) {
        if (!steps[i].applicable(s)) return {false, i};
        s = steps[i].apply(s);
    }
    return {true, std::nullopt};
}

RepairResult repair_plan(const std::vector<GroundAction>& plan, size_t failed_index,
                         const State& current, const SelfModel& model,
                         const std::vector<std::pair<std::string, std::string>>& objects,
                         std::optional<Budget> budget, double w_time, double w_energy) {
    if (failed_index >= plan.size()) throw IndexOutOfRange();

    PlanningProblem sub;
    sub.init = current;
    sub.goal = plan[failed_index].adds;
    sub.actions = ground_actions(model, objects);
    sub.w_time = w_time;
    sub.w_energy = w_energy;

    PlanResult sub_res;
    try {
        sub_res = solve(sub);
    } catch (const Unsolvable&) {
        return {RepairKind::Unrepairable, {}, 0};
    }

    if (budget) {
        double time = 0, energy = 0;
        for (const auto& a : sub_res.steps) {
            time += a.d_max;
            energy += std::isfinite(a.e_max) ? a.e_max : 0.0;
        }
        if (time > budget->time_budget || energy > budget->energy_budget)
            return {RepairKind::NeedLearning, {}, sub_res.cost};
    }

    RepairResult res;
    res.kind = RepairKind::Patched;
    res.steps = sub_res.steps;
    res.steps.insert(res.steps.end(), plan.begin() + failed_index + 1, plan.end());
    res.sub_cost = sub_res.cost;
    if (!validate_plan(res.steps, current).ok) return {RepairKind::Unrepairable, {}, 0};
    return res;
}

bool SafetyProperty::violates(const State& s) const {
    for (const Conjunct& c : forbidden) {
        bool all = std::all_of(c.literals.begin(), c.literals.end(),
                               [&](const Literal& l) { return s.holds(l); }) &&
                   std::all_of(c.fluents.begin(), c.fluents.end(),
                               [&](const NumericConstraint& n) { return s.holds(n); });
        if (all && !(c.literals.empty() && c.fluents.empty())) return true;
    }
    return false;
}

SafetyResult check_safety(const std::vector<GroundAction>& steps, const State& init,
                          const SafetyProperty& props, size_t branch_bound) {
    if (branch_bound > 12 || steps.size() > branch_bound) throw BoundExceeded();

    size_t n = steps.size();
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        std::vector<State> states{init};
        bool bad = props.violates(init);
        for (size_t i = 0; i < n && !bad; ++i) {
            State s = states.back();
            bool failed = (mask >> i) & 1;
            if (failed) {
                // no literal effects, worst-case resource drain
                s.fluents["energy"] -= std::isfinite(steps[i].e_max) ? steps[i].e_max : 0.0;
            } else {
                s = steps[i].apply(s);
            }
            s.fluents["clock"] += steps[i].d_max;
            states.push_back(s);
            bad = props.violates(s);
        }
        if (bad) {
            SafetyResult res;
            res.certified = false;
            for (size_t i = 0; i < n; ++i) res.outcome_vector.push_back((mask >> i) & 1);
            res.states = std::move(states);
            return res;
        }
    }
    return {};
}

}  // namespace sam::planner
