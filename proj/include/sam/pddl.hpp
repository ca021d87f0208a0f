#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sam/literal.hpp"
#include "sam/self_model.hpp"

namespace sam::pddl {

struct SourceSpan {
    size_t line = 1;    // 1-based
    size_t column = 1;  // 1-based
    auto operator<=>(const SourceSpan&) const = default;
};

struct ParseError : std::runtime_error {
    ParseError(SourceSpan span, std::vector<std::string> expected, const std::string& found)
        : std::runtime_error("parse error at " + std::to_string(span.line) + ":" +
                             std::to_string(span.column) + ": expected " + join(expected) +
                             ", found " + found),
          span(span),
          expected(std::move(expected)),
          found(found) {}
    SourceSpan span;
    std::vector<std::string> expected;
    std::string found;

  private:
    static std::string join(const std::vector<std::string>& xs);
};

struct UndeclaredObject : std::runtime_error {
    UndeclaredObject(SourceSpan span, const std::string& sym)
        : std::runtime_error("undeclared object at " + std::to_string(span.line) + ":" +
                             std::to_string(span.column) + ": " + sym),
          span(span),
          symbol(sym) {}
    SourceSpan span;
    std::string symbol;
};

struct PredicateDecl {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;  // (?var, type)
    auto operator<=>(const PredicateDecl&) const = default;
};

/// Parsed durative-actions domain. Subset: :strips :typing :fluents
/// :durative-actions; fixed durations `(= ?duration c)` or interval via the
/// `(:duration-bound lo hi)` extension clause (plus `(:energy-bound lo hi)`);
/// all effects at end, conditions merged from `at start` / `over all`.
struct DomainDocument {
    std::string name;
    std::vector<std::string> requirements;
    std::vector<std::string> types;
    std::vector<std::pair<std::string, std::string>> constants;  // (symbol, type)
    std::vector<PredicateDecl> predicates;
    std::vector<std::string> functions;
    std::vector<ActionDescription> actions;  // declaration order

    auto operator<=>(const DomainDocument&) const = default;
};

struct ProblemDocument {
    std::string name;
    std::string domain_name;
    std::vector<std::pair<std::string, std::string>> objects;  // (symbol, type)
    std::set<Literal> init;                                    // ground positive
    std::map<std::string, double> init_fluents;
    std::set<Literal> goal;  // ground positive conjunction

    auto operator<=>(const ProblemDocument&) const = default;

    State initial_state() const { return State{init, init_fluents}; }
};

DomainDocument parse_domain(const std::string& text);
ProblemDocument parse_problem(const std::string& text);

/// Canonical layout: 2-space indent, one clause per line, lowercase keywords.
/// parse(print(parse(t))) == parse(t).
std::string print_domain(const DomainDocument& doc);
std::string print_problem(const ProblemDocument& doc);

/// Build a self-model from a domain: vocabulary from the declarations,
/// every durative action registered Functional.
SelfModel model_from_domain(const DomainDocument& doc);

/// Sidecar `<domain>.health.json`: map name -> {health, window, version}.
std::string health_sidecar_json(const SelfModel& model);
void apply_health_sidecar(SelfModel& model, const std::string& json_text);

}  // namespace sam::pddl
