#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sam {

/// Ground or schematic atom. Variables are symbols prefixed with '?'.
/// Negative literals never appear inside a State (closed world); they are
/// allowed in preconditions and in percept deltas (retraction).
struct Literal {
    std::string predicate;
    std::vector<std::string> args;
    bool positive = true;

    auto operator<=>(const Literal&) const = default;

    bool is_ground() const;
    Literal negated() const { return {predicate, args, !positive}; }
    std::string str() const;
};

inline bool is_variable(std::string_view s) { return !s.empty() && s.front() == '?'; }

enum class Cmp { Lt, Le, Eq, Ge, Gt };

std::string_view to_string(Cmp c);
Cmp cmp_from_string(std::string_view s);

struct NumericConstraint {
    std::string fluent;
    Cmp cmp = Cmp::Le;
    double bound = 0.0;

    auto operator<=>(const NumericConstraint&) const = default;

    bool holds(double value) const;
    std::string str() const;
};

/// Ground belief snapshot: positive literals under closed world plus
/// numeric fluents (always includes `energy` and `clock` in runtime states).
struct State {
    std::set<Literal> literals;
    std::map<std::string, double> fluents;

    auto operator<=>(const State&) const = default;

    /// Closed-world entailment; negative literal holds iff absent.
    bool holds(const Literal& l) const;
    bool holds(const NumericConstraint& c) const;
    double fluent(const std::string& name, double fallback = 0.0) const;
};

using Binding = std::map<std::string, std::string>;

/// Substitute variables; unbound variables are left in place.
Literal substitute(const Literal& l, const Binding& b);
std::string substitute(const std::string& sym, const Binding& b);

}  // namespace sam
