#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "eclearn/term.hpp"

namespace eclearn {

using TimePoint = long;

// Raised when a built-in comparison is evaluated with unbound arguments.
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One training example: ground facts over an inclusive narrative window
// [t_start, t_end]. Annotation covers [t_start, t_end+1]; the extra leading
// point seeds the held-state at the window start and the trailing point makes
// one-step inference at t_end checkable.
struct Interpretation {
    long id = 0;
    TimePoint t_start = 0;
    TimePoint t_end = 0;
    std::vector<Atom> narrative;   // happensAt/2 and context holdsAt/2
    std::vector<Atom> annotation;  // target holdsAt/2 only

    Interpretation() = default;
    // The indexes point into the fact vectors, so copies re-index.
    Interpretation(const Interpretation& o);
    Interpretation& operator=(const Interpretation& o);
    Interpretation(Interpretation&&) = default;
    Interpretation& operator=(Interpretation&&) = default;

    // Builds lookup indexes; call once after the fact vectors are filled.
    void finalize();

    const std::vector<const Atom*>& narrative_at(const std::string& pred, TimePoint t) const;
    bool annotated(const Term& fluent, TimePoint t) const;
    std::set<Term> annotation_at(TimePoint t) const;
    // Non-numeric constants appearing inside event/fluent terms at time t.
    const std::vector<std::string>& entities_at(TimePoint t) const;
    bool has_annotation_in(TimePoint from, TimePoint to) const;

    // Pairwise euclidean distance / angular difference from the coords and
    // direction context facts, precomputed per time point for the comparison
    // built-ins. Null when either entity lacks the context fact.
    const double* distance(const std::string& a, const std::string& b, TimePoint t) const;
    const double* direction_delta(const std::string& a, const std::string& b, TimePoint t) const;

   private:
    using PairKey = std::tuple<std::string, std::string, TimePoint>;

    std::map<std::pair<std::string, TimePoint>, std::vector<const Atom*>> narrative_index_;
    std::set<std::pair<Term, TimePoint>> annotation_index_;
    std::map<TimePoint, std::vector<std::string>> entity_index_;
    std::map<PairKey, double> distance_index_;
    std::map<PairKey, double> direction_index_;
};

// Target complex-event fluents holding at one time point.
struct FluentState {
    std::set<Term> holding;

    bool holds(const Term& f) const { return holding.count(f) > 0; }
    bool operator==(const FluentState& o) const { return holding == o.holding; }
};

// One-step inference under the inertia axioms:
//   holdsAt(F,T+1) <- initiatedAt(F,T)
//   holdsAt(F,T+1) <- holdsAt(F,T), not terminatedAt(F,T)
// A fluent both initiated and terminated at T is initiated (initiation wins).
FluentState step_infer(const FluentState& prev, const std::set<Term>& initiated,
                       const std::set<Term>& terminated);

// The comparison built-ins evaluated from context facts:
//   distLessThan(P1,P2,D,T) / distMoreThan(P1,P2,D,T): euclidean distance of
//   the coords(P,X,Y) facts at T against threshold D.
//   dirLessThan(P1,P2,A,T): absolute angular difference of the
//   direction(P,D) facts at T, taking min(d, 360-d).
bool is_builtin(const std::string& pred);

// All substitutions that ground `body` at `time` such that every narrative
// literal is a fact of interp and every built-in evaluates true. Literals are
// solved depth-first in the order written, narrative atoms looked up by
// (predicate, time). Throws EvalError on a built-in with unbound arguments.
std::vector<Substitution> cover_body(const std::vector<Literal>& body, const Interpretation& interp,
                                     TimePoint time, const Substitution& partial_theta);

// Same search, stopping at the first solution.
bool covers(const std::vector<Literal>& body, const Interpretation& interp, TimePoint time,
            const Substitution& partial_theta);

// Reusable first-solution query: consecutive checks against the same
// pre-bound substitution share one binding environment instead of copying it
// per call. The hot path for scoring a clause and its candidates on one
// ground instance.
class CoverageQuery {
   public:
    explicit CoverageQuery(Substitution base) : map_(std::move(base)) {}

    bool covers(const std::vector<Literal>& body, const Interpretation& interp, TimePoint time);

   private:
    Substitution map_;
    std::vector<std::string> trail_;
};

// Integer value of an atom's last argument, if it is a numeric constant.
std::optional<TimePoint> atom_time(const Atom& a);

}  // namespace eclearn
