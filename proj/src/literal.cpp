#include "sam/literal.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sam {

bool Literal::is_ground() const {
    for (const auto& a : args)
        if (is_variable(a)) return false;
    return true;
}

std::string Literal::str() const {
    std::ostringstream os;
    if (!positive) os << "not ";
    os << predicate << '(';
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) os << ',';
        os << args[i];
    }
    os << ')';
    return os.str();
}

std::string_view to_string(Cmp c) {
    switch (c) {
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Eq: return "=";
        case Cmp::Ge: return ">=";
        case Cmp::Gt: return ">";
    }
    return "?";
}

Cmp cmp_from_string(std::string_view s) {
    if (s == "<") return Cmp::Lt;
    if (s == "<=") return Cmp::Le;
    if (s == "=") return Cmp::Eq;
    if (s == ">=") return Cmp::Ge;
    if (s == ">") return Cmp::Gt;
    throw std::invalid_argument("unknown comparator: " + std::string(s));
}

bool NumericConstraint::holds(double value) const {
    switch (cmp) {
        case Cmp::Lt: return value < bound;
        case Cmp::Le: return value <= bound;
        case Cmp::Eq: return value == bound;
        case Cmp::Ge: return value >= bound;
        case Cmp::Gt: return value > bound;
    }
    return false;
}

std::string NumericConstraint::str() const {
    std::ostringstream os;
    os << fluent << ' ' << to_string(cmp) << ' ' << bound;
    return os.str();
}

bool State::holds(const Literal& l) const {
    bool present = literals.count(l.positive ? l : l.negated()) > 0;
    return l.positive ? present : !present;
}

bool State::holds(const NumericConstraint& c) const {
    return c.holds(fluent(c.fluent));
}

double State::fluent(const std::string& name, double fallback) const {
    auto it = fluents.find(name);
    return it == fluents.end() ? fallback : it->second;
}

std::string substitute(const std::string& sym, const Binding& b) {
    if (is_variable(sym)) {
        auto it = b.find(sym);
        if (it != b.end()) return it->second;
    }
    return sym;
}

Literal substitute(const Literal& l, const Binding& b) {
    Literal out = l;
    for (auto& a : out.args) a = substitute(a, b);
    return out;
}

}  // namespace sam
