#include "sam/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace sam::learner {

namespace {

using nlohmann::json;

std::string positional_var(size_t i) { return "?a" + std::to_string(i); }

/// Lift a ground literal against the trace arguments: an argument equal to
/// args[i] becomes ?a<i> (first match wins). Returns nullopt when no argument
/// lifts, which drops literals unrelated to the action.
std::optional<Literal> lift(const Literal& l, const std::vector<std::string>& args) {
    Literal out = l;
    bool lifted = false;
    for (auto& a : out.args) {
        for (size_t i = 0; i < args.size(); ++i) {
            if (a == args[i]) {
                a = positional_var(i);
                lifted = true;
                break;
            }
        }
    }
    if (!lifted) return std::nullopt;
    return out;
}

std::set<Literal> lift_all(const std::set<Literal>& lits, const std::vector<std::string>& args) {
    std::set<Literal> out;
    for (const auto& l : lits)
        if (auto lifted = lift(l, args)) out.insert(*lifted);
    return out;
}

std::set<Literal> intersect(const std::set<Literal>& a, const std::set<Literal>& b) {
    std::set<Literal> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.begin()));
    return out;
}

std::vector<const ExecutionTrace*> successful(const std::vector<ExecutionTrace>& traces) {
    std::vector<const ExecutionTrace*> out;
    for (const auto& t : traces)
        if (t.outcome == Outcome::Succeeded) out.push_back(&t);
    return out;
}

void check_schema(const std::vector<ExecutionTrace>& traces) {
    for (size_t i = 1; i < traces.size(); ++i)
        if (traces[i].name != traces[0].name || traces[i].args.size() != traces[0].args.size())
            throw InconsistentSchema();
}

std::set<Literal> changed_adds(const ExecutionTrace& t) {
    std::set<Literal> out;
    for (const auto& l : t.post_state.literals)
        if (!t.pre_state.literals.count(l)) out.insert(l);
    return out;
}

std::set<Literal> changed_deletes(const ExecutionTrace& t) {
    std::set<Literal> out;
    for (const auto& l : t.pre_state.literals)
        if (!t.post_state.literals.count(l)) out.insert(l);
    return out;
}

}  // namespace

Effects learn_effects(const std::vector<ExecutionTrace>& traces) {
    check_schema(traces);
    auto ok = successful(traces);
    if (ok.size() < 2) throw InsufficientData();

    Effects eff;
    eff.adds = lift_all(changed_adds(*ok[0]), ok[0]->args);
    eff.deletes = lift_all(changed_deletes(*ok[0]), ok[0]->args);
    for (size_t i = 1; i < ok.size(); ++i) {
        eff.adds = intersect(eff.adds, lift_all(changed_adds(*ok[i]), ok[i]->args));
        eff.deletes = intersect(eff.deletes, lift_all(changed_deletes(*ok[i]), ok[i]->args));
    }
    return eff;
}

Thresholds estimate_thresholds(const std::vector<std::pair<double, double>>& samples, double k) {
    if (samples.size() < 2) throw InsufficientData();
    auto bound = [&](auto get) {
        double mean = 0;
        for (const auto& s : samples) mean += get(s);
        mean /= static_cast<double>(samples.size());
        double var = 0;
        for (const auto& s : samples) var += (get(s) - mean) * (get(s) - mean);
        var /= static_cast<double>(samples.size());  // population variance
        return std::ceil(mean + k * std::sqrt(var));
    };
    return {bound([](const auto& s) { return s.first; }),
            bound([](const auto& s) { return s.second; })};
}

LearnedDescription synthesize_description(const std::string& name,
                                          const std::vector<ExecutionTrace>& traces,
                                          const SelfModel& model, double k) {
    const ActionDescription* old = model.current(name);
    if (!old) throw UnknownAction(name);
    check_schema(traces);
    auto ok = successful(traces);
    if (ok.size() < 2) throw InsufficientData();
    if (!ok.empty() && ok[0]->args.size() != old->params.size()) throw InconsistentSchema();

    Effects eff = learn_effects(traces);
    if (eff.adds.empty() && eff.deletes.empty()) throw EmptyEffects();

    std::set<Literal> pre = lift_all(ok[0]->pre_state.literals, ok[0]->args);
    for (size_t i = 1; i < ok.size(); ++i)
        pre = intersect(pre, lift_all(ok[i]->pre_state.literals, ok[i]->args));

    std::vector<std::pair<double, double>> samples;
    double d_min = ok[0]->duration, e_min = ok[0]->energy, e_sum = 0;
    for (const auto* t : ok) {
        samples.emplace_back(t->duration, t->energy);
        d_min = std::min(d_min, t->duration);
        e_min = std::min(e_min, t->energy);
        e_sum += t->energy;
    }
    Thresholds th = estimate_thresholds(samples, k);

    // rename positional variables to the old description's parameter names
    Binding rename;
    for (size_t i = 0; i < old->params.size(); ++i)
        rename[positional_var(i)] = old->params[i].first;
    auto renamed = [&](const std::set<Literal>& lits) {
        std::set<Literal> out;
        for (const auto& l : lits) out.insert(substitute(l, rename));
        return out;
    };

    LearnedDescription learned;
    ActionDescription& d = learned.description;
    d.name = name;
    d.params = old->params;
    d.distinct = old->distinct;
    d.pre = renamed(pre);
    d.adds = renamed(eff.adds);
    d.deletes = renamed(eff.deletes);
    d.numeric_effects = {{"energy", NumOp::Decrease, e_sum / static_cast<double>(ok.size())}};
    d.d_min = d_min;
    d.d_max = th.d_max;
    d.e_min = e_min;
    d.e_max = th.e_max;
    d.version = old->version + 1;
    d.health = HealthStatus::Functional;

    learned.support = static_cast<int>(ok.size());
    for (const auto* t : ok) learned.provenance.push_back(t->trace_id);
    return learned;
}

namespace {

json state_to_json(const State& s) {
    json lits = json::array();
    for (const auto& l : s.literals) {
        json jl = {{"pred", l.predicate}, {"args", l.args}};
        lits.push_back(jl);
    }
    return {{"literals", lits}, {"fluents", s.fluents}};
}

State state_from_json(const json& j) {
    State s;
    for (const auto& jl : j.at("literals"))
        s.literals.insert({jl.at("pred").get<std::string>(),
                           jl.at("args").get<std::vector<std::string>>(), true});
    if (j.contains("fluents"))
        s.fluents = j.at("fluents").get<std::map<std::string, double>>();
    return s;
}

}  // namespace

std::string traces_to_jsonl(const std::vector<ExecutionTrace>& traces) {
    std::ostringstream os;
    for (const auto& t : traces) {
        json j = {{"name", t.name},
                  {"args", t.args},
                  {"pre", state_to_json(t.pre_state)},
                  {"post", state_to_json(t.post_state)},
                  {"duration", t.duration},
                  {"energy", t.energy},
                  {"outcome", std::string(to_string(t.outcome))}};
        if (!t.trace_id.empty()) j["id"] = t.trace_id;
        os << j.dump() << "\n";
    }
    return os.str();
}

std::vector<ExecutionTrace> traces_from_jsonl(const std::string& text) {
    std::vector<ExecutionTrace> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        ExecutionTrace t;
        t.name = j.at("name").get<std::string>();
        t.args = j.at("args").get<std::vector<std::string>>();
        t.pre_state = state_from_json(j.at("pre"));
        t.post_state = state_from_json(j.at("post"));
        t.duration = j.at("duration").get<double>();
        t.energy = j.at("energy").get<double>();
        t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
        t.trace_id = j.value("id", "");
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace sam::learner
