#include "eclearn/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace eclearn {

double hoeffding_epsilon(double delta, long n) {
    if (n < 1) throw std::invalid_argument("hoeffding_epsilon: n must be >= 1");
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("hoeffding_epsilon: delta must be in (0,1]");
    return std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

double g_score(const ClauseStats& s, ClauseKind kind) {
    double denom = static_cast<double>(kind == ClauseKind::Initiation ? s.tp + s.fp : s.tp + s.fn);
    if (denom <= 0.0) return 0.0;
    return static_cast<double>(s.tp) / denom;
}

Decision hoeffding_decision(const ClauseStats& parent,
                            const std::map<std::string, ClauseStats>& refinements, ClauseKind kind,
                            const HoeffdingParams& params) {
    if (parent.e < 1 || refinements.empty()) return {};

    // Rank: score desc, parent first on equal score, then smallest key.
    struct Entry {
        double g;
        bool is_parent;
        const std::string* key;
    };
    Entry best{g_score(parent, kind), true, nullptr};
    Entry second{-1.0, false, nullptr};
    auto better = [](const Entry& a, const Entry& b) {
        if (a.g != b.g) return a.g > b.g;
        if (a.is_parent != b.is_parent) return a.is_parent;
        if (a.key && b.key) return *a.key < *b.key;
        return false;
    };
    for (const auto& [key, stats] : refinements) {
        Entry cand{g_score(stats, kind), false, &key};
        if (better(cand, best)) {
            second = best;
            best = cand;
        } else if (better(cand, second)) {
            second = cand;
        }
    }
    if (best.is_parent) return {};
    if (second.g < 0.0) return {};  // no runner-up to compare against

    double eps = hoeffding_epsilon(params.delta, parent.e);
    if (best.g - second.g > eps || eps < params.tie_threshold)
        return {Decision::Action::Specialize, *best.key};
    return {};
}

bool should_prune(const ClauseStats& stats, ClauseKind kind, long stable_since,
                  double avg_specialization_n, const HoeffdingParams& params) {
    // A clause with a viable refinement specializes no later than the
    // tie-break horizon ln(1/delta)/(2 tau^2); only clauses stable past both
    // that and the observed specialization span are candidates for removal.
    // With no specializations observed yet the horizon alone is the bar, so a
    // group captured by an unimprovable low-quality clause can still shed it.
    double tie_horizon = std::log(1.0 / params.delta) /
                         (2.0 * params.tie_threshold * params.tie_threshold);
    double required = std::max(avg_specialization_n, tie_horizon);
    if (stable_since < 1 || static_cast<double>(stable_since) < required) return false;
    double eps = hoeffding_epsilon(params.delta, stable_since);
    return g_score(stats, kind) + eps < params.prune_threshold;
}

}  // namespace eclearn
