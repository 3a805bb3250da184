#include "eclearn/ec.hpp"

#include <algorithm>
#include <cmath>

namespace eclearn {

namespace {

const std::vector<const Atom*> kNoAtoms;
const std::vector<std::string> kNoEntities;

void collect_entities(const Term& t, std::vector<std::string>& out) {
    if (t.is_const()) {
        if (!t.numeric() && std::find(out.begin(), out.end(), t.name) == out.end())
            out.push_back(t.name);
        return;
    }
    for (const Term& a : t.args) collect_entities(a, out);
}

}  // namespace

std::optional<TimePoint> atom_time(const Atom& a) {
    if (a.args.empty()) return std::nullopt;
    auto v = a.args.back().numeric();
    if (!v) return std::nullopt;
    return static_cast<TimePoint>(*v);
}

Interpretation::Interpretation(const Interpretation& o)
    : id(o.id), t_start(o.t_start), t_end(o.t_end), narrative(o.narrative),
      annotation(o.annotation) {
    finalize();
}

Interpretation& Interpretation::operator=(const Interpretation& o) {
    if (this == &o) return *this;
    id = o.id;
    t_start = o.t_start;
    t_end = o.t_end;
    narrative = o.narrative;
    annotation = o.annotation;
    finalize();
    return *this;
}

void Interpretation::finalize() {
    narrative_index_.clear();
    annotation_index_.clear();
    entity_index_.clear();
    distance_index_.clear();
    direction_index_.clear();

    std::map<TimePoint, std::map<std::string, std::pair<double, double>>> coords;
    std::map<TimePoint, std::map<std::string, double>> directions;
    for (const Atom& a : narrative) {
        auto t = atom_time(a);
        if (!t) continue;
        narrative_index_[{a.predicate, *t}].push_back(&a);
        auto& ents = entity_index_[*t];
        for (size_t i = 0; i + 1 < a.args.size(); ++i) collect_entities(a.args[i], ents);
        if (a.predicate == "holdsAt" && a.args.size() == 2 && a.args[0].is_func()) {
            const Term& f = a.args[0];
            if (f.name == "coords" && f.args.size() == 3) {
                auto x = f.args[1].numeric();
                auto y = f.args[2].numeric();
                if (x && y) coords[*t][f.args[0].name] = {*x, *y};
            } else if (f.name == "direction" && f.args.size() == 2) {
                if (auto d = f.args[1].numeric()) directions[*t][f.args[0].name] = *d;
            }
        }
    }
    for (auto& [t, ents] : entity_index_) std::sort(ents.begin(), ents.end());
    for (const Atom& a : annotation) {
        auto t = atom_time(a);
        if (!t || a.args.size() != 2) continue;
        annotation_index_.insert({a.args[0], *t});
    }
    // Pairwise geometry, one canonical key order per pair.
    for (const auto& [t, by_person] : coords) {
        for (auto i = by_person.begin(); i != by_person.end(); ++i) {
            for (auto j = std::next(i); j != by_person.end(); ++j) {
                distance_index_[{i->first, j->first, t}] =
                    std::hypot(i->second.first - j->second.first,
                               i->second.second - j->second.second);
            }
        }
    }
    for (const auto& [t, by_person] : directions) {
        for (auto i = by_person.begin(); i != by_person.end(); ++i) {
            for (auto j = std::next(i); j != by_person.end(); ++j) {
                double d = std::fabs(i->second - j->second);
                direction_index_[{i->first, j->first, t}] = std::min(d, 360.0 - d);
            }
        }
    }
}

const double* Interpretation::distance(const std::string& a, const std::string& b,
                                       TimePoint t) const {
    auto it = a < b ? distance_index_.find({a, b, t}) : distance_index_.find({b, a, t});
    return it == distance_index_.end() ? nullptr : &it->second;
}

const double* Interpretation::direction_delta(const std::string& a, const std::string& b,
                                              TimePoint t) const {
    auto it = a < b ? direction_index_.find({a, b, t}) : direction_index_.find({b, a, t});
    return it == direction_index_.end() ? nullptr : &it->second;
}

const std::vector<const Atom*>& Interpretation::narrative_at(const std::string& pred,
                                                             TimePoint t) const {
    auto it = narrative_index_.find({pred, t});
    return it == narrative_index_.end() ? kNoAtoms : it->second;
}

bool Interpretation::annotated(const Term& fluent, TimePoint t) const {
    return annotation_index_.count({fluent, t}) > 0;
}

std::set<Term> Interpretation::annotation_at(TimePoint t) const {
    std::set<Term> out;
    for (const auto& [f, ft] : annotation_index_) {
        if (ft == t) out.insert(f);
    }
    return out;
}

const std::vector<std::string>& Interpretation::entities_at(TimePoint t) const {
    auto it = entity_index_.find(t);
    return it == entity_index_.end() ? kNoEntities : it->second;
}

bool Interpretation::has_annotation_in(TimePoint from, TimePoint to) const {
    for (const auto& [f, t] : annotation_index_) {
        (void)f;
        if (t >= from && t <= to) return true;
    }
    return false;
}

FluentState step_infer(const FluentState& prev, const std::set<Term>& initiated,
                       const std::set<Term>& terminated) {
    FluentState next;
    next.holding = initiated;
    for (const Term& f : prev.holding) {
        if (!terminated.count(f)) next.holding.insert(f);
    }
    return next;
}

bool is_builtin(const std::string& pred) {
    return pred == "distLessThan" || pred == "distMoreThan" || pred == "dirLessThan";
}

namespace {

bool eval_builtin(const Atom& lit, const Interpretation& interp) {
    if (lit.args.size() != 4) return false;
    for (const Term& t : lit.args) {
        if (!t.ground())
            throw EvalError("built-in " + lit.predicate + " evaluated with unbound argument");
    }
    const std::string& p1 = lit.args[0].name;
    const std::string& p2 = lit.args[1].name;
    if (p1 == p2) return false;  // comparisons relate two distinct entities
    auto threshold = lit.args[2].numeric();
    auto time = lit.args[3].numeric();
    if (!threshold || !time) return false;
    TimePoint t = static_cast<TimePoint>(*time);

    if (lit.predicate == "dirLessThan") {
        const double* d = interp.direction_delta(p1, p2, t);
        return d && *d < *threshold;
    }
    const double* dist = interp.distance(p1, p2, t);
    if (!dist) return false;
    if (lit.predicate == "distLessThan") return *dist < *threshold;
    return *dist > *threshold;  // distMoreThan
}

// Mutable substitution with an undo trail, so the depth-first search binds
// and unbinds in place instead of copying maps per unification trial.
struct Binding {
    Substitution& map;
    std::vector<std::string>& trail;

    size_t mark() const { return trail.size(); }
    void undo(size_t to) {
        while (trail.size() > to) {
            map.erase(trail.back());
            trail.pop_back();
        }
    }
};

bool unify_terms_mut(const Term& a, const Term& b, Binding& binding) {
    Term x = walk(a, binding.map);
    Term y = walk(b, binding.map);
    if (x.is_var() && y.is_var() && x.name == y.name) return true;
    if (x.is_var()) {
        binding.map.emplace(x.name, y);
        binding.trail.push_back(x.name);
        return true;
    }
    if (y.is_var()) {
        binding.map.emplace(y.name, x);
        binding.trail.push_back(y.name);
        return true;
    }
    if (x.kind != y.kind || x.name != y.name || x.args.size() != y.args.size()) return false;
    for (size_t i = 0; i < x.args.size(); ++i) {
        if (!unify_terms_mut(x.args[i], y.args[i], binding)) return false;
    }
    return true;
}

// Depth-first search over body literals. `first_only` short-circuits after
// one solution. The occurs check is skipped: facts are ground, so no cycle
// can form.
bool solve(const std::vector<Literal>& body, size_t idx, const Interpretation& interp,
           TimePoint time, Binding& binding, std::vector<Substitution>& out, bool first_only) {
    if (idx == body.size()) {
        out.push_back(binding.map);
        return true;
    }
    const Literal& lit = body[idx];
    if (is_builtin(lit.predicate)) {
        Atom grounded = substitute(lit, binding.map);
        if (!eval_builtin(grounded, interp)) return false;
        return solve(body, idx + 1, interp, time, binding, out, first_only);
    }
    // Narrative literal: look up facts at the literal's time (the bound time
    // argument if it already has one, else the query time).
    TimePoint t = time;
    if (!lit.args.empty()) {
        Term last = substitute(lit.args.back(), binding.map);
        if (auto v = last.numeric()) t = static_cast<TimePoint>(*v);
    }
    bool found = false;
    for (const Atom* fact : interp.narrative_at(lit.predicate, t)) {
        if (fact->args.size() != lit.args.size()) continue;
        size_t mark = binding.mark();
        bool matched = true;
        for (size_t i = 0; i < lit.args.size() && matched; ++i)
            matched = unify_terms_mut(lit.args[i], fact->args[i], binding);
        if (matched && solve(body, idx + 1, interp, time, binding, out, first_only)) {
            found = true;
            if (first_only) {
                binding.undo(mark);
                return true;
            }
        }
        binding.undo(mark);
    }
    return found;
}

}  // namespace

std::vector<Substitution> cover_body(const std::vector<Literal>& body, const Interpretation& interp,
                                     TimePoint time, const Substitution& partial_theta) {
    std::vector<Substitution> out;
    Substitution map = partial_theta;
    std::vector<std::string> trail;
    Binding binding{map, trail};
    solve(body, 0, interp, time, binding, out, false);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool covers(const std::vector<Literal>& body, const Interpretation& interp, TimePoint time,
            const Substitution& partial_theta) {
    std::vector<Substitution> out;
    Substitution map = partial_theta;
    std::vector<std::string> trail;
    Binding binding{map, trail};
    solve(body, 0, interp, time, binding, out, true);
    return !out.empty();
}

bool CoverageQuery::covers(const std::vector<Literal>& body, const Interpretation& interp,
                           TimePoint time) {
    thread_local std::vector<Substitution> scratch;
    scratch.clear();
    Binding binding{map_, trail_};
    size_t mark = binding.mark();
    solve(body, 0, interp, time, binding, scratch, true);
    binding.undo(mark);
    return !scratch.empty();
}

}  // namespace eclearn
