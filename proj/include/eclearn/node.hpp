#pragma once

#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eclearn/infer.hpp"
#include "eclearn/ledger.hpp"
#include "eclearn/modes.hpp"
#include "eclearn/theory.hpp"
#include "eclearn/transport.hpp"

namespace eclearn {

enum class Phase { Running, AwaitingStats, AwaitingVerdict };

struct NodeOptions {
    bool generation = true;
    bool specialization = true;
    bool pruning = true;
};

struct NodeMetrics {
    long interpretations = 0;
    long clauses_generated = 0;
    long clauses_replaced = 0;
    long clauses_pruned = 0;
    long rounds_started = 0;
    long rounds_abandoned = 0;
};

// One processing node of a learner group. Consumes its own partition of the
// interpretation stream, keeps per-clause and per-candidate counters, and
// coordinates structural changes (specialize, prune) with its peers through
// the mediator. Single-threaded: the owner interleaves
// process_interpretation() and handle() calls; while a round is in flight the
// node is blocked and must not be fed stream input.
class LearnerNode {
   public:
    LearnerNode(std::string id, ClauseKind kind, const ModeSet& modes, HoeffdingParams params,
                std::vector<std::string> peers, std::string mediator, Sender send,
                NodeOptions options = {});

    const std::string& id() const { return id_; }
    ClauseKind kind() const { return kind_; }
    const Theory& theory() const { return theory_; }
    Theory& mutable_theory() { return theory_; }  // harness injection only
    const NodeMetrics& metrics() const { return metrics_; }
    double avg_specialization_n() const { return spec_count_ ? avg_spec_n_ : 0.0; }
    const HoeffdingParams& params() const { return params_; }

    bool blocked() const { return my_round_.has_value() || !pending_verdicts_.empty(); }
    Phase phase() const;

    // Precondition: not blocked.
    void process_interpretation(const Interpretation& interp);
    void handle(const Envelope& env);

    // Scripted-schedule harness hook: open a round for this clause as if the
    // local test had fired.
    void force_request(ClauseId id, const std::string& purpose);

   private:
    struct Trigger {
        Term fluent;
        TimePoint time;
    };
    struct Round {
        ClauseId clause_id;
        std::string purpose;
        std::vector<Message> replies;
    };

    std::optional<Trigger> score_window(const Interpretation& interp);
    void generate_clause(const Interpretation& interp, const Trigger& trigger);
    bool locally_unimprovable(const Clause& c) const;
    void local_structural_ops();
    void try_start_round();
    void start_round(ClauseId id, const std::string& purpose);
    void reply_stats(const Envelope& env);
    void finish_round();
    void apply_add(const Clause& c);
    void apply_replace(ClauseId id, Clause next);
    void apply_remove(ClauseId id);
    void record_specialization(long n);
    void send_to(const std::string& to, Message m);
    void broadcast_to_peers(Message m);
    void after_unblock();
    std::vector<Clause>& own_clauses();

    std::string id_;
    ClauseKind kind_;
    const ModeSet* modes_;
    HoeffdingParams params_;
    std::vector<std::string> peers_;
    std::string mediator_;
    Sender send_;
    NodeOptions opt_;

    Theory theory_;
    PeerLedger ledger_;
    std::set<ClauseId> tombstones_;
    std::optional<Round> my_round_;
    std::set<ClauseId> pending_verdicts_;
    std::deque<Envelope> pending_;
    NodeMetrics metrics_;
    long clause_seq_ = 0;
    double avg_spec_n_ = 0.0;
    long spec_count_ = 0;
};

}  // namespace eclearn
