#include "eclearn/clause.hpp"

#include <algorithm>
#include <set>

#include "eclearn/parse.hpp"

namespace eclearn {

ClauseId make_clause_id(const std::string& origin_node, long counter) {
    std::string key = origin_node + "#" + std::to_string(counter);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ClauseKind Clause::kind() const {
    return head.predicate == "terminatedAt" ? ClauseKind::Termination : ClauseKind::Initiation;
}

std::vector<Clause::Candidate> Clause::candidates() const {
    std::vector<Candidate> out;
    if (!bottom) return out;

    std::vector<std::string> bound;
    collect_vars(head, bound);
    for (const Literal& l : body) collect_vars(l, bound);

    for (const BottomLiteral& bl : bottom->literals) {
        if (std::find(body.begin(), body.end(), bl.lit) != body.end()) continue;
        bool ok = !bl.input_vars.empty();
        for (const std::string& v : bl.input_vars) {
            if (std::find(bound.begin(), bound.end(), v) == bound.end()) ok = false;
        }
        if (!ok) continue;
        out.push_back({to_string(bl.lit), bl.lit});
    }
    return out;
}

void Clause::reset_refinements() {
    refinement_stats.clear();
    for (const Candidate& c : candidates()) refinement_stats.emplace(c.key, ClauseStats{});
}

namespace {

struct Variabilizer {
    // constant name -> (variable name, type it was introduced with)
    std::map<std::string, std::pair<std::string, std::string>> map;
    int next_var = 0;

    std::string intro(const std::string& constant, const std::string& type) {
        auto it = map.find(constant);
        if (it != map.end()) return it->second.first;
        std::string var = type == "time" ? (next_time_++ ? "T" + std::to_string(next_time_ - 1) : "T")
                                         : "X" + std::to_string(next_var++);
        map.emplace(constant, std::make_pair(var, type));
        return var;
    }
    bool has(const std::string& constant, const std::string& type) const {
        auto it = map.find(constant);
        return it != map.end() && it->second.second == type;
    }
    // constants introduced with the given type, in variable order
    std::vector<std::string> constants_of(const std::string& type) const {
        std::vector<std::pair<std::string, std::string>> tmp;  // var -> constant
        for (const auto& [c, vt] : map) {
            if (vt.second == type) tmp.push_back({vt.first, c});
        }
        std::sort(tmp.begin(), tmp.end());
        std::vector<std::string> out;
        for (auto& [v, c] : tmp) out.push_back(c);
        return out;
    }

   private:
    int next_time_ = 0;
};

// Matches a ground term against a mode schema. Input slots require an
// already-variabilized constant of the right type (except in head position,
// where they introduce the variables the clause is called with); output slots
// variabilize new constants (refused when allow_new_vars is false, which
// enforces the depth bound); pool slots keep the constant. Returns the
// variabilized term and the input variables consumed.
bool variabilize(const Term& ground, const ModeTerm& schema, Variabilizer& vars,
                 bool allow_new_vars, bool head_position, Term& out,
                 std::vector<std::string>& inputs) {
    switch (schema.kind) {
        case ModeTerm::Kind::Input: {
            if (!ground.is_const()) return false;
            if (!head_position && !vars.has(ground.name, schema.name)) return false;
            if (head_position) {
                auto it = vars.map.find(ground.name);
                if (it != vars.map.end() && it->second.second != schema.name) return false;
            }
            std::string v = vars.intro(ground.name, schema.name);
            inputs.push_back(v);
            out = Term::var(v);
            return true;
        }
        case ModeTerm::Kind::Output: {
            if (!ground.is_const()) return false;
            auto it = vars.map.find(ground.name);
            if (it != vars.map.end() && it->second.second != schema.name) return false;
            if (it == vars.map.end() && !allow_new_vars) return false;
            out = Term::var(vars.intro(ground.name, schema.name));
            return true;
        }
        case ModeTerm::Kind::Pool:
        case ModeTerm::Kind::Fixed: {
            if (!ground.is_const()) return false;
            if (schema.kind == ModeTerm::Kind::Fixed && ground.name != schema.name) return false;
            out = ground;
            return true;
        }
        case ModeTerm::Kind::Function: {
            if (!ground.is_func() || ground.name != schema.name ||
                ground.args.size() != schema.args.size())
                return false;
            Term f = Term::func(ground.name, {});
            for (size_t i = 0; i < ground.args.size(); ++i) {
                Term sub;
                if (!variabilize(ground.args[i], schema.args[i], vars, allow_new_vars, head_position,
                                 sub, inputs))
                    return false;
                f.args.push_back(sub);
            }
            out = f;
            return true;
        }
    }
    return false;
}

bool has_output_slot(const ModeTerm& mt) {
    if (mt.kind == ModeTerm::Kind::Output) return true;
    for (const ModeTerm& a : mt.args) {
        if (has_output_slot(a)) return true;
    }
    return false;
}

// Enumerates ground instantiations of a built-in mode over the variabilized
// constants and the pools, keeping those that evaluate true at seed_time.
void saturate_builtin(const ModeDeclaration& mode, const Interpretation& seed, TimePoint seed_time,
                      Variabilizer& vars, const ModeSet& modes,
                      std::vector<BottomLiteral>& out, int& budget) {
    for (const ModeTerm& a : mode.args) {
        if (has_output_slot(a))
            throw ConfigError("built-in mode " + mode.predicate + " cannot have output slots");
    }
    // Candidate constants per slot.
    std::vector<std::vector<Term>> slot_choices;
    for (const ModeTerm& a : mode.args) {
        std::vector<Term> choices;
        if (a.kind == ModeTerm::Kind::Input) {
            for (const std::string& c : vars.constants_of(a.name)) choices.push_back(Term::constant(c));
        } else if (a.kind == ModeTerm::Kind::Pool) {
            auto it = modes.pools.find(a.name);
            if (it != modes.pools.end()) choices = it->second;
        } else if (a.kind == ModeTerm::Kind::Fixed) {
            choices.push_back(Term::constant(a.name));
        } else {
            return;  // nested functions unsupported in built-in modes
        }
        if (choices.empty()) return;
        slot_choices.push_back(std::move(choices));
    }

    std::vector<size_t> idx(slot_choices.size(), 0);
    while (true) {
        Atom ground{mode.predicate, {}};
        for (size_t i = 0; i < idx.size(); ++i) ground.args.push_back(slot_choices[i][idx[i]]);

        bool distinct_inputs = true;
        std::set<std::string> seen;
        for (size_t i = 0; i < mode.args.size(); ++i) {
            if (mode.args[i].kind == ModeTerm::Kind::Input && !seen.insert(ground.args[i].name).second)
                distinct_inputs = false;
        }
        // The comparisons are symmetric in their two entities; keep one
        // canonical argument order so saturation does not produce twin
        // literals with permanently tied scores.
        if (distinct_inputs && ground.args.size() >= 2) {
            const auto& v0 = vars.map.find(ground.args[0].name);
            const auto& v1 = vars.map.find(ground.args[1].name);
            if (v0 != vars.map.end() && v1 != vars.map.end() &&
                v0->second.first > v1->second.first)
                distinct_inputs = false;
        }
        if (distinct_inputs && budget != 0) {
            std::vector<Literal> one{ground};
            if (covers(one, seed, seed_time, {})) {
                BottomLiteral bl;
                bl.lit.predicate = mode.predicate;
                for (size_t i = 0; i < mode.args.size(); ++i) {
                    const ModeTerm& s = mode.args[i];
                    if (s.kind == ModeTerm::Kind::Input) {
                        std::string v = vars.intro(ground.args[i].name, s.name);
                        bl.lit.args.push_back(Term::var(v));
                        bl.input_vars.push_back(v);
                    } else {
                        bl.lit.args.push_back(ground.args[i]);
                    }
                }
                if (std::find_if(out.begin(), out.end(), [&](const BottomLiteral& x) {
                        return x.lit == bl.lit;
                    }) == out.end()) {
                    out.push_back(std::move(bl));
                    if (budget > 0) --budget;
                }
            }
        }

        size_t k = idx.size();
        while (k > 0) {
            if (++idx[k - 1] < slot_choices[k - 1].size()) break;
            idx[k - 1] = 0;
            --k;
        }
        if (k == 0) break;
    }
}

}  // namespace

BottomClause construct_bottom(const Interpretation& seed, TimePoint seed_time,
                              const Term& target_fluent, ClauseKind head_kind,
                              const ModeSet& modes) {
    const std::string head_pred =
        head_kind == ClauseKind::Initiation ? "initiatedAt" : "terminatedAt";

    Variabilizer vars;
    BottomClause bottom;

    // Head: variabilize the target fluent under the first matching head mode.
    bool matched = false;
    for (const ModeDeclaration& h : modes.heads) {
        if (h.predicate != head_pred || h.args.size() != 2) continue;
        Variabilizer trial;
        Term fluent_out;
        std::vector<std::string> inputs;
        if (!variabilize(target_fluent, h.args[0], trial, true, true, fluent_out, inputs)) continue;
        Term time_out;
        if (!variabilize(Term::number(static_cast<double>(seed_time)), h.args[1], trial, true, true,
                         time_out, inputs))
            continue;
        vars = trial;
        bottom.head = Atom{head_pred, {fluent_out, time_out}};
        matched = true;
        break;
    }
    if (!matched)
        throw ConfigError("no " + head_pred + " head mode matches target fluent " +
                          to_string(target_fluent));

    // Body saturation. Two passes: pass 1 may introduce new (depth-1)
    // variables through output slots, pass 2 may only consume them.
    std::map<const ModeDeclaration*, int> budgets;
    for (const ModeDeclaration& m : modes.bodies)
        budgets[&m] = m.recall > 0 ? m.recall : -1;

    for (int pass = 0; pass < 2; ++pass) {
        bool allow_new_vars = pass == 0;
        for (const ModeDeclaration& m : modes.bodies) {
            int& budget = budgets[&m];
            if (budget == 0) continue;
            if (is_builtin(m.predicate)) {
                saturate_builtin(m, seed, seed_time, vars, modes, bottom.literals, budget);
                continue;
            }
            for (const Atom* fact : seed.narrative_at(m.predicate, seed_time)) {
                if (budget == 0) break;
                if (fact->args.size() != m.args.size()) continue;
                Variabilizer trial = vars;
                BottomLiteral bl;
                bl.lit.predicate = m.predicate;
                bool ok = true;
                for (size_t i = 0; i < m.args.size() && ok; ++i) {
                    Term out;
                    ok = variabilize(fact->args[i], m.args[i], trial, allow_new_vars, false, out,
                                     bl.input_vars);
                    if (ok) bl.lit.args.push_back(out);
                }
                if (!ok) continue;
                if (std::find_if(bottom.literals.begin(), bottom.literals.end(),
                                 [&](const BottomLiteral& x) { return x.lit == bl.lit; }) !=
                    bottom.literals.end())
                    continue;
                vars = trial;
                bottom.literals.push_back(std::move(bl));
                if (budget > 0) --budget;
            }
        }
    }
    return bottom;
}

Clause make_root_clause(ClauseId id, std::shared_ptr<const BottomClause> bottom) {
    Clause c;
    c.id = id;
    c.head = bottom->head;
    c.bottom = std::move(bottom);
    c.reset_refinements();
    return c;
}

Clause specialize_with(const Clause& r, const std::string& key) {
    Clause out;
    out.id = r.id;
    out.head = r.head;
    out.body = r.body;
    out.bottom = r.bottom;
    bool found = false;
    for (const Clause::Candidate& c : r.candidates()) {
        if (c.key == key) {
            out.body.push_back(c.lit);
            found = true;
            break;
        }
    }
    if (!found) throw std::logic_error("specialize_with: unknown candidate key " + key);
    out.reset_refinements();
    return out;
}

std::string render_clause(const Atom& head, const std::vector<Literal>& body) {
    std::string s = to_string(head);
    if (!body.empty()) {
        s += " :- ";
        for (size_t i = 0; i < body.size(); ++i) {
            if (i) s += ", ";
            s += to_string(body[i]);
        }
    }
    s += ".";
    return s;
}

std::string render_clause(const Clause& c) { return render_clause(c.head, c.body); }

Clause parse_clause(const std::string& text) {
    ParsedClause pc = parse_clause_text(text);
    Clause c;
    c.head = std::move(pc.head);
    c.body = std::move(pc.body);
    return c;
}

}  // namespace eclearn
