#include "sam/self_model.hpp"

#include <algorithm>

namespace sam {

std::string_view to_string(Outcome o) {
    return o == Outcome::Succeeded ? "Succeeded" : "Failed";
}

Outcome outcome_from_string(std::string_view s) {
    if (s == "Succeeded") return Outcome::Succeeded;
    if (s == "Failed") return Outcome::Failed;
    throw std::invalid_argument("unknown outcome: " + std::string(s));
}

namespace {

void collect_vars(const std::set<Literal>& lits, std::set<std::string>& out) {
    for (const auto& l : lits)
        for (const auto& a : l.args)
            if (is_variable(a)) out.insert(a);
}

int failures_in(const std::deque<Outcome>& w) {
    return static_cast<int>(std::count(w.begin(), w.end(), Outcome::Failed));
}

int trailing_successes(const std::deque<Outcome>& w) {
    int n = 0;
    for (auto it = w.rbegin(); it != w.rend() && *it == Outcome::Succeeded; ++it) ++n;
    return n;
}

}  // namespace

void SelfModel::check_invariants(const ActionDescription& desc) const {
    if (desc.name.empty()) throw InvalidDescription("action name empty");
    if (desc.d_min > desc.d_max) throw InvalidDescription(desc.name + ": d_min > d_max");
    if (desc.e_min > desc.e_max) throw InvalidDescription(desc.name + ": e_min > e_max");
    for (const auto& a : desc.adds)
        if (desc.deletes.count(a)) throw InvalidDescription(desc.name + ": adds and deletes overlap on " + a.str());

    std::set<std::string> declared;
    for (const auto& [v, ty] : desc.params) {
        declared.insert(v);
        if (!type_hierarchy.empty() && !type_hierarchy.count(ty))
            throw VocabularyViolation(desc.name + ": unknown type " + ty);
    }
    std::set<std::string> used;
    collect_vars(desc.pre, used);
    collect_vars(desc.adds, used);
    collect_vars(desc.deletes, used);
    for (const auto& v : used)
        if (!declared.count(v))
            throw InvalidDescription(desc.name + ": variable " + v + " not in parameters");

    auto check_lit = [&](const Literal& l) {
        if (!predicate_vocab.count({l.predicate, static_cast<int>(l.args.size())}))
            throw VocabularyViolation(desc.name + ": unknown predicate " + l.predicate + "/" +
                                      std::to_string(l.args.size()));
    };
    for (const auto& l : desc.pre) check_lit(l);
    for (const auto& l : desc.adds) check_lit(l);
    for (const auto& l : desc.deletes) check_lit(l);
    for (const auto& c : desc.num_pre)
        if (!fluent_vocab.count(c.fluent))
            throw VocabularyViolation(desc.name + ": unknown fluent " + c.fluent);
    for (const auto& e : desc.numeric_effects)
        if (!fluent_vocab.count(e.fluent))
            throw VocabularyViolation(desc.name + ": unknown fluent " + e.fluent);
}

uint64_t SelfModel::register_action(ActionDescription desc) {
    if (actions.count(desc.name)) throw DuplicateAction(desc.name);
    check_invariants(desc);
    desc.health = HealthStatus::Functional;
    desc.outcome_window.clear();
    actions[desc.name].push_back(std::move(desc));
    return ++revision;
}

HealthStatus SelfModel::record_outcome(const std::string& name, Outcome outcome, uint64_t) {
    auto it = actions.find(name);
    if (it == actions.end()) throw UnknownAction(name);
    // outcomes accrue to the currently active version
    ActionDescription* desc = nullptr;
    for (auto& d : it->second)
        if (d.health != HealthStatus::Deprecated) desc = &d;
    if (!desc) desc = &it->second.back();

    desc->outcome_window.push_back(outcome);
    while (desc->outcome_window.size() > kOutcomeWindow) desc->outcome_window.pop_front();

    switch (desc->health) {
        case HealthStatus::Functional:
            if (outcome == Outcome::Failed && failures_in(desc->outcome_window) >= kSuspectFailures)
                desc->health = step_health(desc->health, HealthEvent::PersistentFailure);
            break;
        case HealthStatus::Suspect:
            if (outcome == Outcome::Failed)
                desc->health = step_health(desc->health, HealthEvent::RepeatedFailure);
            else if (trailing_successes(desc->outcome_window) >= kRecoverySuccesses)
                desc->health = step_health(desc->health, HealthEvent::RecoveryObserved);
            break;
        case HealthStatus::Deprecated:
            break;  // absorbing
    }
    ++revision;
    return desc->health;
}

std::vector<ActionDescription> SelfModel::functional_actions() const {
    std::vector<ActionDescription> out;
    for (const auto& [name, versions] : actions)
        for (const auto& d : versions)
            if (d.health != HealthStatus::Deprecated) out.push_back(d);
    std::sort(out.begin(), out.end(), [](const ActionDescription& a, const ActionDescription& b) {
        return a.name != b.name ? a.name < b.name : a.version < b.version;
    });
    return out;
}

uint64_t SelfModel::replace_description(const std::string& name, ActionDescription new_desc) {
    auto it = actions.find(name);
    if (it == actions.end()) throw UnknownAction(name);
    int current_version = it->second.back().version;
    if (new_desc.version <= current_version) throw StaleVersion(name);
    check_invariants(new_desc);
    for (auto& d : it->second) d.health = HealthStatus::Deprecated;
    new_desc.health = HealthStatus::Functional;
    new_desc.outcome_window.clear();
    it->second.push_back(std::move(new_desc));
    return ++revision;
}

const ActionDescription* SelfModel::current(const std::string& name) const {
    auto it = actions.find(name);
    if (it == actions.end()) return nullptr;
    for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit)
        if (rit->health != HealthStatus::Deprecated) return &*rit;
    return &it->second.back();
}

const ActionDescription* SelfModel::find(const std::string& name, int version) const {
    auto it = actions.find(name);
    if (it == actions.end()) return nullptr;
    for (const auto& d : it->second)
        if (d.version == version) return &d;
    return nullptr;
}

}  // namespace sam
