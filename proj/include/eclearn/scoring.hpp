#pragma once

#include <map>
#include <string>

namespace eclearn {

enum class ClauseKind { Initiation, Termination };

// TP/FP/FN counters plus the number of examples the clause was evaluated on.
struct ClauseStats {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long e = 0;

    bool operator==(const ClauseStats& o) const {
        return tp == o.tp && fp == o.fp && fn == o.fn && e == o.e;
    }
};

struct HoeffdingParams {
    double delta = 0.05;
    double tie_threshold = 0.05;   // tau: specialize on ties once epsilon < tau
    double prune_threshold = 0.3;  // theta
    long warm_up = 20;             // min e for a clause to be emitted
};

// epsilon = sqrt(ln(1/delta) / 2n). Throws std::invalid_argument on n < 1.
double hoeffding_epsilon(double delta, long n);

// Precision for initiation clauses, recall for termination clauses. 0/0 is
// scored 0 so untested clauses never look perfect.
double g_score(const ClauseStats& s, ClauseKind kind);

struct Decision {
    enum class Action { Keep, Specialize };
    Action action = Action::Keep;
    std::string candidate_key;  // set when action == Specialize
};

// The Hoeffding specialization test. The parent clause competes against its
// candidates; candidates ranked by g-score, parent winning ties outright
// (shortest body), then lexicographically smallest key. Specialize when the
// top candidate beats the runner-up by more than epsilon(delta, parent.e),
// or when epsilon has shrunk below the tie threshold.
Decision hoeffding_decision(const ClauseStats& parent,
                            const std::map<std::string, ClauseStats>& refinements, ClauseKind kind,
                            const HoeffdingParams& params);

// A clause is pruned once it has been structurally stable for at least the
// average specialization span observed so far, and a Hoeffding interval on
// the examples seen since it stabilized puts its score below the prune
// threshold. avg_specialization_n <= 0 means no specialization has happened
// yet and pruning is disabled.
bool should_prune(const ClauseStats& stats, ClauseKind kind, long stable_since,
                  double avg_specialization_n, const HoeffdingParams& params);

}  // namespace eclearn
