#pragma once

#include <map>
#include <set>

#include "eclearn/clause.hpp"
#include "eclearn/ec.hpp"
#include "eclearn/theory.hpp"

namespace eclearn {

// Ground instantiations of a fluent schema (e.g. moving(X0,X1)) over the
// entities present at time t. Distinct variables bind pairwise-distinct
// entities; constants in the schema stay fixed.
std::set<Term> ground_instances(const Term& fluent_schema, const Interpretation& interp,
                                TimePoint t);

// Does the clause body cover the interpretation at t with the head bound to
// this ground fluent?
bool fires_on(const Atom& head, const std::vector<Literal>& body, const Term& fluent,
              const Interpretation& interp, TimePoint t);

// Substitution binding the head to the ground fluent at t, or nullopt when
// they do not match; reusable across coverage checks of the same instance.
std::optional<Substitution> head_binding(const Atom& head, const Term& fluent, TimePoint t);
std::optional<Substitution> head_binding(const Atom& head, const Term& fluent,
                                         const Term& time_term);

// All ground fluents the clause fires on at t.
std::set<Term> clause_firings(const Clause& c, const Interpretation& interp, TimePoint t);

// Inferred vs annotated target fluents at one labeled time point.
struct StepLabels {
    std::set<Term> inferred;
    std::set<Term> annotated;
};

enum class InstanceLabel { TP, FP, FN, TN };

// Runs the clauses over the window: for each T in [t_start, t_end] the
// initiation/termination firings feed step_infer, and the resulting state is
// labeled against the annotation at T+1. `state` carries in the held fluents
// at t_start and carries out the state at t_end+1.
std::map<TimePoint, StepLabels> classify_instances(const Theory& theory,
                                                   const Interpretation& interp,
                                                   FluentState& state);

InstanceLabel label_of(const StepLabels& labels, const Term& fluent);

}  // namespace eclearn
