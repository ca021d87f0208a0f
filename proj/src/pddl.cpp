#include "sam/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace sam::pddl {

std::string ParseError::join(const std::vector<std::string>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += " | ";
        out += xs[i];
    }
    return out.empty() ? "<nothing>" : out;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct Sexpr {
    bool atom = true;
    std::string sym;           // atoms only, case preserved
    std::vector<Sexpr> items;  // lists only
    SourceSpan span;           // start of this expression
    SourceSpan close;          // closing paren of a list

    std::string key() const { return atom ? lower(sym) : std::string(); }
    std::string describe() const { return atom ? "'" + sym + "'" : "(...)"; }
};

struct Lexer {
    explicit Lexer(const std::string& text) : text(text) {}

    const std::string& text;
    size_t pos = 0;
    size_t line = 1, col = 1;

    void skip_ws() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    SourceSpan here() const { return {line, col}; }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
};

bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
}

Sexpr parse_sexpr(Lexer& lx) {
    lx.skip_ws();
    SourceSpan start = lx.here();
    if (lx.pos >= lx.text.size())
        throw ParseError(start, {"'('", "atom"}, "end of input");
    char c = lx.text[lx.pos];
    if (c == ')') throw ParseError(start, {"'('", "atom"}, "')'");
    if (c == '(') {
        Sexpr list;
        list.atom = false;
        list.span = start;
        lx.advance();
        while (true) {
            lx.skip_ws();
            if (lx.pos >= lx.text.size())
                throw ParseError(lx.here(), {"')'"}, "end of input");
            if (lx.text[lx.pos] == ')') {
                list.close = lx.here();
                lx.advance();
                return list;
            }
            list.items.push_back(parse_sexpr(lx));
        }
    }
    Sexpr atom;
    atom.span = start;
    while (lx.pos < lx.text.size() && !is_delim(lx.text[lx.pos])) {
        atom.sym += lx.text[lx.pos];
        lx.advance();
    }
    return atom;
}

Sexpr parse_top(const std::string& text) {
    Lexer lx(text);
    Sexpr e = parse_sexpr(lx);
    if (!lx.eof()) throw ParseError(lx.here(), {"end of input"}, "'" + std::string(1, text[lx.pos]) + "'");
    return e;
}

bool is_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

double expect_number(const Sexpr& e) {
    double v;
    if (!e.atom || !is_number(e.sym, v))
        throw ParseError(e.span, {"number"}, e.describe());
    return v;
}

std::string expect_atom(const Sexpr& e, const char* what) {
    if (!e.atom) throw ParseError(e.span, {what}, "(...)");
    return e.sym;
}

const Sexpr& nth(const Sexpr& list, size_t i, const char* what) {
    if (i >= list.items.size()) throw ParseError(list.close, {what}, "')'");
    return list.items[i];
}

// "?a ?b - t1 ?c - t2" style typed list
std::vector<std::pair<std::string, std::string>> parse_typed_list(const Sexpr& list) {
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<std::string> pending;
    for (size_t i = 0; i < list.items.size(); ++i) {
        std::string sym = expect_atom(list.items[i], "symbol");
        if (sym == "-") {
            const Sexpr& ty = nth(list, ++i, "type name");
            std::string type = expect_atom(ty, "type name");
            if (pending.empty()) throw ParseError(list.items[i - 1].span, {"symbol"}, "'-'");
            for (auto& p : pending) out.emplace_back(std::move(p), type);
            pending.clear();
        } else {
            pending.push_back(sym);
        }
    }
    for (auto& p : pending) out.emplace_back(std::move(p), "object");
    return out;
}

Literal parse_atom_literal(const Sexpr& e) {
    if (e.atom || e.items.empty())
        throw ParseError(e.span, {"(predicate args...)"}, e.describe());
    Literal l;
    l.predicate = expect_atom(e.items[0], "predicate name");
    for (size_t i = 1; i < e.items.size(); ++i)
        l.args.push_back(expect_atom(e.items[i], "argument"));
    return l;
}

bool is_cmp_sym(const std::string& s) {
    return s == "<" || s == "<=" || s == "=" || s == ">=" || s == ">";
}

// (>= (energy) 10)
NumericConstraint parse_numeric_condition(const Sexpr& e) {
    NumericConstraint c;
    c.cmp = cmp_from_string(expect_atom(e.items[0], "comparator"));
    const Sexpr& f = nth(e, 1, "(fluent)");
    if (f.atom || f.items.size() != 1)
        throw ParseError(f.span, {"(fluent)"}, f.describe());
    c.fluent = expect_atom(f.items[0], "fluent name");
    c.bound = expect_number(nth(e, 2, "number"));
    return c;
}

struct TimedItem {
    enum When { AtStart, OverAll, AtEnd } when;
    const Sexpr* body;
};

// (at start X) | (over all X) | (at end X); returns body sexpr
const Sexpr& parse_time_qualifier(const Sexpr& e, TimedItem::When& when) {
    if (e.atom || e.items.size() != 3)
        throw ParseError(e.span, {"(at start ...)", "(over all ...)", "(at end ...)"}, e.describe());
    std::string a = e.items[0].key();
    std::string b = e.items[1].key();
    if (a == "at" && b == "start") when = TimedItem::AtStart;
    else if (a == "over" && b == "all") when = TimedItem::OverAll;
    else if (a == "at" && b == "end") when = TimedItem::AtEnd;
    else throw ParseError(e.items[0].span, {"at start", "over all", "at end"}, a + " " + b);
    return e.items[2];
}

std::vector<const Sexpr*> conjuncts(const Sexpr& e) {
    std::vector<const Sexpr*> out;
    if (!e.atom && !e.items.empty() && e.items[0].key() == "and") {
        for (size_t i = 1; i < e.items.size(); ++i) out.push_back(&e.items[i]);
    } else {
        out.push_back(&e);
    }
    return out;
}

void parse_condition_body(const Sexpr& body, ActionDescription& desc) {
    if (body.atom || body.items.empty())
        throw ParseError(body.span, {"condition"}, body.describe());
    std::string k = body.items[0].key();
    if (k == "not") {
        const Sexpr& inner = nth(body, 1, "literal");
        if (!inner.atom && !inner.items.empty() && inner.items[0].key() == "=") {
            // (not (= ?a ?b)) -> distinctness constraint
            std::string a = expect_atom(nth(inner, 1, "variable"), "variable");
            std::string b = expect_atom(nth(inner, 2, "variable"), "variable");
            desc.distinct.insert({std::min(a, b), std::max(a, b)});
            return;
        }
        Literal l = parse_atom_literal(inner);
        l.positive = false;
        desc.pre.insert(l);
        return;
    }
    if (is_cmp_sym(body.items[0].sym) && body.items.size() == 3 && !body.items[1].atom) {
        desc.num_pre.push_back(parse_numeric_condition(body));
        return;
    }
    desc.pre.insert(parse_atom_literal(body));
}

void parse_effect_body(const Sexpr& body, ActionDescription& desc) {
    if (body.atom || body.items.empty())
        throw ParseError(body.span, {"effect"}, body.describe());
    std::string k = body.items[0].key();
    if (k == "not") {
        desc.deletes.insert(parse_atom_literal(nth(body, 1, "literal")));
        return;
    }
    if (k == "increase" || k == "decrease") {
        NumericEffect ne;
        ne.op = k == "increase" ? NumOp::Increase : NumOp::Decrease;
        const Sexpr& f = nth(body, 1, "(fluent)");
        if (f.atom || f.items.size() != 1)
            throw ParseError(f.span, {"(fluent)"}, f.describe());
        ne.fluent = expect_atom(f.items[0], "fluent name");
        ne.amount = expect_number(nth(body, 2, "number"));
        desc.numeric_effects.push_back(ne);
        return;
    }
    desc.adds.insert(parse_atom_literal(body));
}

ActionDescription parse_durative_action(const Sexpr& clause) {
    ActionDescription desc;
    desc.e_max = std::numeric_limits<double>::infinity();
    desc.name = expect_atom(nth(clause, 1, "action name"), "action name");
    bool have_duration = false, have_effect = false, have_condition = false;
    size_t i = 2;
    while (i < clause.items.size()) {
        const Sexpr& item = clause.items[i];
        if (item.atom) {
            std::string kw = item.key();
            const Sexpr& val = nth(clause, i + 1, "clause value");
            if (kw == ":parameters") {
                if (val.atom) throw ParseError(val.span, {"parameter list"}, val.describe());
                desc.params = parse_typed_list(val);
            } else if (kw == ":duration") {
                // (= ?duration c)
                if (val.atom || val.items.size() != 3 || val.items[0].key() != "=" ||
                    val.items[1].key() != "?duration")
                    throw ParseError(val.span, {"(= ?duration <number>)"}, val.describe());
                desc.d_min = desc.d_max = expect_number(val.items[2]);
                have_duration = true;
            } else if (kw == ":condition") {
                have_condition = true;
                for (const Sexpr* c : conjuncts(val)) {
                    TimedItem::When when;
                    const Sexpr& body = parse_time_qualifier(*c, when);
                    if (when == TimedItem::AtEnd)
                        throw ParseError(c->span, {"(at start ...)", "(over all ...)"},
                                         "at end condition");
                    parse_condition_body(body, desc);
                }
            } else if (kw == ":effect") {
                have_effect = true;
                for (const Sexpr* c : conjuncts(val)) {
                    TimedItem::When when;
                    const Sexpr& body = parse_time_qualifier(*c, when);
                    if (when != TimedItem::AtEnd)
                        throw ParseError(c->span, {"(at end ...)"}, "non-end effect");
                    parse_effect_body(body, desc);
                }
            } else {
                throw ParseError(item.span,
                                 {":parameters", ":duration", ":condition", ":effect"}, kw);
            }
            i += 2;
        } else {
            // extension clauses (:duration-bound lo hi) / (:energy-bound lo hi)
            std::string kw = item.items.empty() ? "" : item.items[0].key();
            if (kw == ":duration-bound") {
                desc.d_min = expect_number(nth(item, 1, "number"));
                desc.d_max = expect_number(nth(item, 2, "number"));
                have_duration = true;
            } else if (kw == ":energy-bound") {
                desc.e_min = expect_number(nth(item, 1, "number"));
                desc.e_max = expect_number(nth(item, 2, "number"));
            } else {
                throw ParseError(item.span, {"(:duration-bound lo hi)", "(:energy-bound lo hi)"},
                                 item.describe());
            }
            ++i;
        }
    }
    if (!have_duration)
        throw ParseError(clause.close, {":duration", "(:duration-bound lo hi)"}, "')'");
    if (!have_condition) throw ParseError(clause.close, {":condition"}, "')'");
    if (!have_effect) throw ParseError(clause.close, {":effect"}, "')'");
    return desc;
}

void expect_define(const Sexpr& top, const char* kind) {
    if (top.atom || top.items.size() < 2 || top.items[0].key() != "define")
        throw ParseError(top.span, {"(define ...)"}, top.describe());
    const Sexpr& head = top.items[1];
    if (head.atom || head.items.size() != 2 || head.items[0].key() != kind)
        throw ParseError(head.span, {std::string("(") + kind + " <name>)"}, head.describe());
}

}  // namespace

DomainDocument parse_domain(const std::string& text) {
    Sexpr top = parse_top(text);
    expect_define(top, "domain");
    DomainDocument doc;
    doc.name = expect_atom(top.items[1].items[1], "domain name");
    bool have_requirements = false;
    for (size_t i = 2; i < top.items.size(); ++i) {
        const Sexpr& clause = top.items[i];
        if (clause.atom || clause.items.empty() || !clause.items[0].atom)
            throw ParseError(clause.span, {"(:requirements ...)", "(:durative-action ...)"},
                             clause.describe());
        std::string kw = clause.items[0].key();
        if (kw == ":requirements") {
            have_requirements = true;
            for (size_t j = 1; j < clause.items.size(); ++j)
                doc.requirements.push_back(lower(expect_atom(clause.items[j], "requirement")));
            if (std::find(doc.requirements.begin(), doc.requirements.end(),
                          ":durative-actions") == doc.requirements.end())
                throw ParseError(clause.span, {":durative-actions"}, "requirements without it");
        } else if (kw == ":types") {
            for (size_t j = 1; j < clause.items.size(); ++j)
                doc.types.push_back(expect_atom(clause.items[j], "type name"));
        } else if (kw == ":constants") {
            Sexpr rest = clause;
            rest.items.erase(rest.items.begin());
            doc.constants = parse_typed_list(rest);
        } else if (kw == ":predicates") {
            for (size_t j = 1; j < clause.items.size(); ++j) {
                const Sexpr& p = clause.items[j];
                if (p.atom || p.items.empty())
                    throw ParseError(p.span, {"(name ?v - type ...)"}, p.describe());
                PredicateDecl decl;
                decl.name = expect_atom(p.items[0], "predicate name");
                Sexpr rest = p;
                rest.items.erase(rest.items.begin());
                decl.params = parse_typed_list(rest);
                doc.predicates.push_back(std::move(decl));
            }
        } else if (kw == ":functions") {
            for (size_t j = 1; j < clause.items.size(); ++j) {
                const Sexpr& f = clause.items[j];
                if (f.atom || f.items.size() != 1)
                    throw ParseError(f.span, {"(fluent)"}, f.describe());
                doc.functions.push_back(expect_atom(f.items[0], "fluent name"));
            }
        } else if (kw == ":durative-action") {
            doc.actions.push_back(parse_durative_action(clause));
        } else {
            throw ParseError(clause.items[0].span,
                             {":requirements", ":types", ":constants", ":predicates", ":functions",
                              ":durative-action"},
                             kw);
        }
    }
    if (!have_requirements)
        throw ParseError(top.close, {"(:requirements ... :durative-actions)"}, "')'");
    return doc;
}

ProblemDocument parse_problem(const std::string& text) {
    Sexpr top = parse_top(text);
    expect_define(top, "problem");
    ProblemDocument doc;
    doc.name = expect_atom(top.items[1].items[1], "problem name");
    std::set<std::string> declared;
    for (size_t i = 2; i < top.items.size(); ++i) {
        const Sexpr& clause = top.items[i];
        if (clause.atom || clause.items.empty() || !clause.items[0].atom)
            throw ParseError(clause.span, {"(:domain ...)", "(:objects ...)"}, clause.describe());
        std::string kw = clause.items[0].key();
        if (kw == ":domain") {
            doc.domain_name = expect_atom(nth(clause, 1, "domain name"), "domain name");
        } else if (kw == ":objects") {
            Sexpr rest = clause;
            rest.items.erase(rest.items.begin());
            doc.objects = parse_typed_list(rest);
            for (const auto& [sym, ty] : doc.objects) declared.insert(sym);
        } else if (kw == ":init") {
            for (size_t j = 1; j < clause.items.size(); ++j) {
                const Sexpr& e = clause.items[j];
                if (e.atom || e.items.empty())
                    throw ParseError(e.span, {"(predicate args...)", "(= (fluent) n)"}, e.describe());
                if (e.items[0].key() == "=") {
                    const Sexpr& f = nth(e, 1, "(fluent)");
                    if (f.atom || f.items.size() != 1)
                        throw ParseError(f.span, {"(fluent)"}, f.describe());
                    doc.init_fluents[expect_atom(f.items[0], "fluent name")] =
                        expect_number(nth(e, 2, "number"));
                } else {
                    Literal l = parse_atom_literal(e);
                    for (size_t k = 0; k < l.args.size(); ++k) {
                        if (is_variable(l.args[k]))
                            throw ParseError(e.items[k + 1].span, {"ground symbol"}, l.args[k]);
                        if (!declared.count(l.args[k]))
                            throw UndeclaredObject(e.items[k + 1].span, l.args[k]);
                    }
                    doc.init.insert(std::move(l));
                }
            }
        } else if (kw == ":goal") {
            const Sexpr& g = nth(clause, 1, "goal condition");
            for (const Sexpr* c : conjuncts(g)) {
                Literal l = parse_atom_literal(*c);
                for (size_t k = 0; k < l.args.size(); ++k) {
                    if (is_variable(l.args[k]))
                        throw ParseError(c->items[k + 1].span, {"ground symbol"}, l.args[k]);
                    if (!declared.count(l.args[k]))
                        throw UndeclaredObject(c->items[k + 1].span, l.args[k]);
                }
                doc.goal.insert(std::move(l));
            }
        } else {
            throw ParseError(clause.items[0].span, {":domain", ":objects", ":init", ":goal"}, kw);
        }
    }
    return doc;
}

namespace {

std::string fmt_num(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        std::ostringstream os;
        os << static_cast<long long>(v);
        return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt_lit(const Literal& l) {
    std::string s = "(" + l.predicate;
    for (const auto& a : l.args) s += " " + a;
    s += ")";
    if (!l.positive) s = "(not " + s + ")";
    return s;
}

std::string fmt_typed(const std::vector<std::pair<std::string, std::string>>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += " ";
        s += xs[i].first + " - " + xs[i].second;
    }
    return s;
}

}  // namespace

std::string print_domain(const DomainDocument& doc) {
    std::ostringstream os;
    os << "(define (domain " << doc.name << ")\n";
    os << "  (:requirements";
    for (const auto& r : doc.requirements) os << " " << r;
    os << ")\n";
    if (!doc.types.empty()) {
        os << "  (:types";
        for (const auto& t : doc.types) os << " " << t;
        os << ")\n";
    }
    if (!doc.constants.empty()) os << "  (:constants " << fmt_typed(doc.constants) << ")\n";
    if (!doc.predicates.empty()) {
        os << "  (:predicates\n";
        for (const auto& p : doc.predicates) {
            os << "    (" << p.name;
            if (!p.params.empty()) os << " " << fmt_typed(p.params);
            os << ")\n";
        }
        os << "  )\n";
    }
    if (!doc.functions.empty()) {
        os << "  (:functions";
        for (const auto& f : doc.functions) os << " (" << f << ")";
        os << ")\n";
    }
    for (const auto& a : doc.actions) {
        os << "  (:durative-action " << a.name << "\n";
        os << "    :parameters (" << fmt_typed(a.params) << ")\n";
        if (a.d_min == a.d_max)
            os << "    :duration (= ?duration " << fmt_num(a.d_max) << ")\n";
        else
            os << "    (:duration-bound " << fmt_num(a.d_min) << " " << fmt_num(a.d_max) << ")\n";
        if (std::isfinite(a.e_max))
            os << "    (:energy-bound " << fmt_num(a.e_min) << " " << fmt_num(a.e_max) << ")\n";
        os << "    :condition (and\n";
        for (const auto& l : a.pre) os << "      (at start " << fmt_lit(l) << ")\n";
        for (const auto& [x, y] : a.distinct)
            os << "      (at start (not (= " << x << " " << y << ")))\n";
        for (const auto& c : a.num_pre)
            os << "      (at start (" << to_string(c.cmp) << " (" << c.fluent << ") "
               << fmt_num(c.bound) << "))\n";
        os << "    )\n";
        os << "    :effect (and\n";
        for (const auto& l : a.adds) os << "      (at end " << fmt_lit(l) << ")\n";
        for (const auto& l : a.deletes) os << "      (at end (not " << fmt_lit(l) << "))\n";
        for (const auto& e : a.numeric_effects)
            os << "      (at end (" << (e.op == NumOp::Increase ? "increase" : "decrease") << " ("
               << e.fluent << ") " << fmt_num(e.amount) << "))\n";
        os << "    )\n";
        os << "  )\n";
    }
    os << ")\n";
    return os.str();
}

std::string print_problem(const ProblemDocument& doc) {
    std::ostringstream os;
    os << "(define (problem " << doc.name << ")\n";
    os << "  (:domain " << doc.domain_name << ")\n";
    os << "  (:objects " << fmt_typed(doc.objects) << ")\n";
    os << "  (:init\n";
    for (const auto& l : doc.init) os << "    " << fmt_lit(l) << "\n";
    for (const auto& [f, v] : doc.init_fluents) os << "    (= (" << f << ") " << fmt_num(v) << ")\n";
    os << "  )\n";
    os << "  (:goal (and\n";
    for (const auto& l : doc.goal) os << "    " << fmt_lit(l) << "\n";
    os << "  ))\n";
    os << ")\n";
    return os.str();
}

SelfModel model_from_domain(const DomainDocument& doc) {
    SelfModel model;
    for (const auto& t : doc.types) model.type_hierarchy.insert(t);
    for (const auto& p : doc.predicates)
        model.predicate_vocab.insert({p.name, static_cast<int>(p.params.size())});
    for (const auto& f : doc.functions) model.fluent_vocab.insert(f);
    for (const auto& a : doc.actions) model.register_action(a);
    return model;
}

std::string health_sidecar_json(const SelfModel& model) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, versions] : model.actions) {
        const ActionDescription& d = versions.back();
        nlohmann::json w = nlohmann::json::array();
        for (Outcome o : d.outcome_window) w.push_back(std::string(to_string(o)));
        j[name] = {{"health", std::string(to_string(d.health))},
                   {"window", w},
                   {"version", d.version}};
    }
    return j.dump(2) + "\n";
}

void apply_health_sidecar(SelfModel& model, const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    for (auto& [name, entry] : j.items()) {
        auto it = model.actions.find(name);
        if (it == model.actions.end()) throw UnknownAction(name);
        ActionDescription& d = it->second.back();
        d.health = health_status_from_string(entry.at("health").get<std::string>());
        d.version = entry.value("version", d.version);
        d.outcome_window.clear();
        for (const auto& o : entry.at("window"))
            d.outcome_window.push_back(outcome_from_string(o.get<std::string>()));
    }
}

}  // namespace sam::pddl
