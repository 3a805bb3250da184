#include "eclearn/term.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace eclearn {

Term Term::number(double v) {
    // Integral values render without a decimal point so they round-trip
    // through the fact-file format unchanged.
    char buf[64];
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    } else {
        std::snprintf(buf, sizeof buf, "%g", v);
    }
    return constant(buf);
}

bool Term::ground() const {
    if (is_var()) return false;
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.ground(); });
}

std::optional<double> Term::numeric() const {
    if (!is_const() || name.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(name.c_str(), &end);
    if (end != name.c_str() + name.size()) return std::nullopt;
    return v;
}

bool Term::operator==(const Term& o) const {
    return kind == o.kind && name == o.name && args == o.args;
}

bool Term::operator<(const Term& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (name != o.name) return name < o.name;
    return std::lexicographical_compare(args.begin(), args.end(), o.args.begin(), o.args.end());
}

bool Atom::ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.ground(); });
}

bool Atom::operator<(const Atom& o) const {
    if (predicate != o.predicate) return predicate < o.predicate;
    return std::lexicographical_compare(args.begin(), args.end(), o.args.begin(), o.args.end());
}

Term walk(const Term& t, const Substitution& theta) {
    const Term* cur = &t;
    while (cur->is_var()) {
        auto it = theta.find(cur->name);
        if (it == theta.end()) break;
        cur = &it->second;
    }
    return *cur;
}

Term substitute(const Term& t, const Substitution& theta) {
    Term w = walk(t, theta);
    if (w.is_func()) {
        for (Term& a : w.args) a = substitute(a, theta);
    }
    return w;
}

Atom substitute(const Atom& a, const Substitution& theta) {
    Atom out;
    out.predicate = a.predicate;
    out.args.reserve(a.args.size());
    for (const Term& t : a.args) out.args.push_back(substitute(t, theta));
    return out;
}

namespace {

bool occurs(const std::string& var, const Term& t, const Substitution& theta) {
    Term w = walk(t, theta);
    if (w.is_var()) return w.name == var;
    for (const Term& a : w.args) {
        if (occurs(var, a, theta)) return true;
    }
    return false;
}

}  // namespace

bool unify_terms(const Term& a, const Term& b, Substitution& theta) {
    Term x = walk(a, theta);
    Term y = walk(b, theta);
    if (x.is_var() && y.is_var() && x.name == y.name) return true;
    if (x.is_var()) {
        if (occurs(x.name, y, theta)) return false;
        theta[x.name] = y;
        return true;
    }
    if (y.is_var()) {
        if (occurs(y.name, x, theta)) return false;
        theta[y.name] = x;
        return true;
    }
    if (x.kind != y.kind || x.name != y.name || x.args.size() != y.args.size()) return false;
    for (size_t i = 0; i < x.args.size(); ++i) {
        if (!unify_terms(x.args[i], y.args[i], theta)) return false;
    }
    return true;
}

std::optional<Substitution> unify(const Atom& a, const Atom& b, Substitution theta) {
    if (a.predicate != b.predicate || a.args.size() != b.args.size()) return std::nullopt;
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (!unify_terms(a.args[i], b.args[i], theta)) return std::nullopt;
    }
    return theta;
}

void collect_vars(const Term& t, std::vector<std::string>& out) {
    if (t.is_var()) {
        if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
        return;
    }
    for (const Term& a : t.args) collect_vars(a, out);
}

void collect_vars(const Atom& a, std::vector<std::string>& out) {
    for (const Term& t : a.args) collect_vars(t, out);
}

std::string to_string(const Term& t) {
    if (!t.is_func()) return t.name;
    std::ostringstream os;
    os << t.name << '(';
    for (size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ',';
        os << to_string(t.args[i]);
    }
    os << ')';
    return os.str();
}

std::string to_string(const Atom& a) {
    if (a.args.empty()) return a.predicate;
    std::ostringstream os;
    os << a.predicate << '(';
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) os << ',';
        os << to_string(a.args[i]);
    }
    os << ')';
    return os.str();
}

}  // namespace eclearn
