#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "eclearn/data.hpp"
#include "eclearn/mediator.hpp"
#include "eclearn/node.hpp"
#include "eclearn/theory.hpp"
#include "eclearn/transport.hpp"

namespace eclearn {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LearnOptions {
    HoeffdingParams params;
    int nodes = 1;
    std::string transport = "inproc";  // "inproc" | "socket"
    std::uint64_t seed = 0;
    NodeOptions node_options;
    std::string socket_host = "127.0.0.1";
    int socket_port = 0;  // 0 picks an ephemeral port
};

struct RunReport {
    double training_seconds = 0.0;
    double f1 = 0.0;
    long tp = 0, fp = 0, fn = 0;
    long theory_size_literals = 0;
    long messages_sent = 0;
    long message_bytes = 0;
    long clauses_generated = 0;
    long clauses_pruned = 0;
    int nodes = 1;
    int folds = 0;
    bool no_positives = false;
    Theory final_theory;

    std::string to_kv() const;
    std::string human() const;
};

struct EvalResult {
    long tp = 0, fp = 0, fn = 0;
    double f1 = 0.0;
};

// One learner group (initiation or termination) over k in-process nodes plus
// a mediator. The scheduler is a deterministic lockstep: pending messages are
// delivered first (global FIFO), then every unblocked node processes one
// interpretation of its substream — in parallel worker threads when k > 1.
// Sends are staged in per-endpoint outboxes and flushed in endpoint order, so
// runs are reproducible regardless of thread timing. The on_quiescent hook
// fires at every quiescent point (no messages in flight, every node Running).
class InProcGroup {
   public:
    InProcGroup(ClauseKind kind, int k, const ModeSet& modes, const HoeffdingParams& params,
                std::uint64_t seed, NodeOptions options = {},
                Router::Order order = Router::Order::Fifo);

    void run(const std::vector<std::vector<Interpretation>>& substreams,
             const std::function<void(const InProcGroup&)>& on_quiescent = {});

    size_t size() const { return nodes_.size(); }
    LearnerNode& node(size_t i) { return *nodes_.at(i); }
    const LearnerNode& node(size_t i) const { return *nodes_.at(i); }
    Router& router() { return router_; }
    const Router& router() const { return router_; }
    Mediator* mediator() { return mediator_.get(); }

    bool theories_consistent() const;

    // Delivers staged and queued messages until the transport is idle; the
    // scripted protocol harnesses drive rounds through this.
    void pump();

   private:
    void flush_outboxes();
    void pump_messages();

    Router router_;
    std::vector<std::vector<Envelope>> outboxes_;  // one per node, mediator last
    std::vector<std::unique_ptr<LearnerNode>> nodes_;
    std::unique_ptr<Mediator> mediator_;
};

// Runs both learner groups over the partitioned stream and reports metrics.
// The emitted theory keeps the clauses evaluated on at least warm_up
// examples; f1 is resubstitution on the training stream.
RunReport learn(const std::vector<Interpretation>& data, const ModeSet& modes,
                const LearnOptions& options);

// Recognition over a test stream: the held state chains across the whole
// stream from empty, and inferred fluents are scored against the annotation
// at every labeled point. Micro-averaged F1.
EvalResult evaluate(const Theory& theory, const std::vector<Interpretation>& stream);

// Contiguous fold split on interpretation boundaries, temporal order kept
// within folds; per-fold counts are summed before the F1 ratio.
RunReport cross_validate(const std::vector<Interpretation>& data, const ModeSet& modes, int folds,
                         const LearnOptions& options);

std::string node_name(ClauseKind kind, int index);
std::string mediator_name(ClauseKind kind);

}  // namespace eclearn
