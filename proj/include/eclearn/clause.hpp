#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "eclearn/ec.hpp"
#include "eclearn/modes.hpp"
#include "eclearn/scoring.hpp"
#include "eclearn/term.hpp"

namespace eclearn {

using ClauseId = std::uint64_t;

// FNV-1a over "origin#counter"; ids are assigned by the generating node and
// shared verbatim by every replica.
ClauseId make_clause_id(const std::string& origin_node, long counter);

struct BottomLiteral {
    Literal lit;
    // Variables that filled '+' slots; a specialization may append this
    // literal only once all of them are bound by the head or earlier body
    // literals.
    std::vector<std::string> input_vars;

    bool operator==(const BottomLiteral& o) const {
        return lit == o.lit && input_vars == o.input_vars;
    }
};

// The saturation of one seed example under the mode declarations. Literal
// order and variable names are deterministic functions of the seed, so
// independently shipped copies are identical.
struct BottomClause {
    Atom head;
    std::vector<BottomLiteral> literals;

    bool operator==(const BottomClause& o) const {
        return head == o.head && literals == o.literals;
    }
};

// A candidate Event Calculus axiom under construction.
struct Clause {
    ClauseId id = 0;
    Atom head;
    std::vector<Literal> body;
    std::shared_ptr<const BottomClause> bottom;

    ClauseStats stats;
    std::map<std::string, ClauseStats> refinement_stats;  // candidate key -> stats
    long stable_since = 0;  // examples at this node since the last structural change
    long lineage_e = 0;     // examples since the clause id was born; survives Replace

    ClauseKind kind() const;
    const Term& target_fluent() const { return head.args.at(0); }

    struct Candidate {
        std::string key;
        Literal lit;
    };
    // One candidate per connectable bottom literal not already in the body.
    // Keys are the rendered literal text; bottoms ship verbatim between
    // replicas, so keys agree everywhere.
    std::vector<Candidate> candidates() const;

    // Zeroed stats entries for the current candidate set.
    void reset_refinements();
};

// Builds the most specific clause the modes allow for the seed instance:
// head over the variabilized target fluent, body the mode-conforming literals
// true in the seed narrative at seed_time. Consistent variabilization (same
// constant, same variable), #type slots keep pool constants, variable depth
// bounded at 1. Throws ConfigError if no head mode matches the target.
BottomClause construct_bottom(const Interpretation& seed, TimePoint seed_time,
                              const Term& target_fluent, ClauseKind head_kind,
                              const ModeSet& modes);

// Empty-bodied clause over the bottom's head.
Clause make_root_clause(ClauseId id, std::shared_ptr<const BottomClause> bottom);

// The clause with `key`'s literal appended; same id, fresh stats and
// refinements, stable counter reset.
Clause specialize_with(const Clause& r, const std::string& key);

std::string render_clause(const Atom& head, const std::vector<Literal>& body);
std::string render_clause(const Clause& c);

// Parses "head :- lit1, ..., litn." into a bottom-less clause (used for
// ground-truth theories and the wire codec).
Clause parse_clause(const std::string& text);

}  // namespace eclearn
