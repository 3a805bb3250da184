#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eclearn {

// First-order term: a variable, a constant, or a function term such as
// walk(id1). Constants whose text is numeric can be read back as numbers
// (used by the comparison built-ins).
struct Term {
    enum class Kind { Variable, Constant, Function };

    Kind kind = Kind::Constant;
    std::string name;
    std::vector<Term> args;  // nonempty only for Kind::Function

    static Term var(std::string n) { return Term{Kind::Variable, std::move(n), {}}; }
    static Term constant(std::string n) { return Term{Kind::Constant, std::move(n), {}}; }
    static Term number(double v);
    static Term func(std::string n, std::vector<Term> a) {
        return Term{Kind::Function, std::move(n), std::move(a)};
    }

    bool is_var() const { return kind == Kind::Variable; }
    bool is_const() const { return kind == Kind::Constant; }
    bool is_func() const { return kind == Kind::Function; }

    bool ground() const;
    std::optional<double> numeric() const;

    bool operator==(const Term& o) const;
    bool operator!=(const Term& o) const { return !(*this == o); }
    bool operator<(const Term& o) const;
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    bool ground() const;

    bool operator==(const Atom& o) const { return predicate == o.predicate && args == o.args; }
    bool operator!=(const Atom& o) const { return !(*this == o); }
    bool operator<(const Atom& o) const;
};

// Clause bodies are positive conjunctions, so a literal is just an atom.
using Literal = Atom;

// Variable name -> bound term.
using Substitution = std::map<std::string, Term>;

// Resolve variable chains in theta; unbound variables stay as themselves.
Term walk(const Term& t, const Substitution& theta);

Term substitute(const Term& t, const Substitution& theta);
Atom substitute(const Atom& a, const Substitution& theta);

// Most general extension of theta making the two sides equal, or nullopt.
// Occurs check included.
bool unify_terms(const Term& a, const Term& b, Substitution& theta);
std::optional<Substitution> unify(const Atom& a, const Atom& b, Substitution theta);

void collect_vars(const Term& t, std::vector<std::string>& out);
void collect_vars(const Atom& a, std::vector<std::string>& out);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);

}  // namespace eclearn
