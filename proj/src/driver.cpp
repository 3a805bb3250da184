#include "eclearn/driver.hpp"

#include <atomic>
#include <chrono>
#include <thread>
#include <sstream>

#include "eclearn/infer.hpp"
#include "eclearn/socket_transport.hpp"

namespace eclearn {

namespace {

// Busy-wait rendezvous for the lockstep sweeps. Windows cost tens of
// microseconds, so futex-based synchronization would dominate; short spins
// keep the workers hot.
class SpinGate {
   public:
    explicit SpinGate(int parties) : parties_(parties) {}

    void arrive_and_wait() {
        unsigned gen = generation_.load(std::memory_order_acquire);
        if (arrived_.fetch_add(1, std::memory_order_acq_rel) + 1 == parties_) {
            arrived_.store(0, std::memory_order_relaxed);
            generation_.fetch_add(1, std::memory_order_release);
        } else {
            while (generation_.load(std::memory_order_acquire) == gen) {
#if defined(__x86_64__) || defined(__i386__)
                __builtin_ia32_pause();
#else
                std::this_thread::yield();
#endif
            }
        }
    }

   private:
    int parties_;
    std::atomic<int> arrived_{0};
    std::atomic<unsigned> generation_{0};
};

}  // namespace

std::string node_name(ClauseKind kind, int index) {
    return (kind == ClauseKind::Initiation ? "init/n" : "term/n") + std::to_string(index);
}

std::string mediator_name(ClauseKind kind) {
    return kind == ClauseKind::Initiation ? "init/mediator" : "term/mediator";
}

InProcGroup::InProcGroup(ClauseKind kind, int k, const ModeSet& modes,
                         const HoeffdingParams& params, std::uint64_t seed, NodeOptions options,
                         Router::Order order)
    : router_(order, seed), outboxes_(static_cast<size_t>(k) + 1) {
    auto stage = [this](size_t slot) {
        return [this, slot](Envelope env) { outboxes_[slot].push_back(std::move(env)); };
    };

    std::vector<std::string> ids;
    for (int i = 0; i < k; ++i) ids.push_back(node_name(kind, i));

    if (k > 1) {
        mediator_ = std::make_unique<Mediator>(mediator_name(kind), ids, seed,
                                               stage(static_cast<size_t>(k)));
        router_.attach(mediator_->id(),
                       [this](const Envelope& env) { mediator_->handle(env); });
    }
    for (int i = 0; i < k; ++i) {
        std::vector<std::string> peers;
        for (const std::string& other : ids) {
            if (other != ids[static_cast<size_t>(i)]) peers.push_back(other);
        }
        auto node = std::make_unique<LearnerNode>(ids[static_cast<size_t>(i)], kind, modes, params,
                                                  k > 1 ? peers : std::vector<std::string>{},
                                                  k > 1 ? mediator_->id() : "",
                                                  stage(static_cast<size_t>(i)), options);
        router_.attach(node->id(), [raw = node.get()](const Envelope& env) { raw->handle(env); });
        nodes_.push_back(std::move(node));
    }
}

void InProcGroup::flush_outboxes() {
    for (auto& box : outboxes_) {
        for (Envelope& env : box) router_.send(std::move(env));
        box.clear();
    }
}

void InProcGroup::pump_messages() {
    flush_outboxes();
    while (router_.dispatch_one()) flush_outboxes();
}

void InProcGroup::pump() { pump_messages(); }

bool InProcGroup::theories_consistent() const {
    auto reference = nodes_.front()->theory().structure();
    for (size_t i = 1; i < nodes_.size(); ++i) {
        if (nodes_[i]->theory().structure() != reference) return false;
    }
    return true;
}

void InProcGroup::run(const std::vector<std::vector<Interpretation>>& substreams,
                      const std::function<void(const InProcGroup&)>& on_quiescent) {
    if (substreams.size() != nodes_.size())
        throw std::logic_error("substream count does not match node count");

    size_t k = nodes_.size();
    std::vector<size_t> pos(k, 0);

    // Lockstep worker pool: each sweep, every node in `sweep_work` processes
    // one interpretation concurrently; all sends land in disjoint outboxes.
    // On a single hardware thread the sweep runs in node order instead, with
    // identical message timing either way.
    bool parallel = k > 1 && std::thread::hardware_concurrency() >= 2;
    std::vector<size_t> sweep_work;
    std::vector<std::exception_ptr> worker_errors(k);
    std::unique_ptr<SpinGate> start_gate;
    std::unique_ptr<SpinGate> done_gate;
    std::vector<std::thread> workers;
    bool stop = false;
    if (parallel) {
        start_gate = std::make_unique<SpinGate>(static_cast<int>(k) + 1);
        done_gate = std::make_unique<SpinGate>(static_cast<int>(k) + 1);
        for (size_t w = 0; w < k; ++w) {
            workers.emplace_back([&, w] {
                while (true) {
                    start_gate->arrive_and_wait();
                    if (stop) return;
                    if (std::find(sweep_work.begin(), sweep_work.end(), w) != sweep_work.end()) {
                        try {
                            nodes_[w]->process_interpretation(substreams[w][pos[w]]);
                        } catch (...) {
                            worker_errors[w] = std::current_exception();
                        }
                    }
                    done_gate->arrive_and_wait();
                }
            });
        }
    }
    auto shutdown = [&] {
        if (parallel) {
            stop = true;
            start_gate->arrive_and_wait();
            for (std::thread& t : workers) t.join();
        }
    };

    while (true) {
        pump_messages();

        bool all_running = true;
        for (const auto& n : nodes_) {
            if (n->blocked()) all_running = false;
        }
        if (all_running && on_quiescent) on_quiescent(*this);

        sweep_work.clear();
        for (size_t i = 0; i < k; ++i) {
            if (!nodes_[i]->blocked() && pos[i] < substreams[i].size()) sweep_work.push_back(i);
        }
        if (sweep_work.empty()) {
            if (!router_.idle()) continue;
            bool exhausted = true;
            for (size_t i = 0; i < k; ++i) {
                if (pos[i] < substreams[i].size()) exhausted = false;
            }
            shutdown();
            if (exhausted && all_running) return;
            throw ProtocolError("scheduler stalled: transport idle with blocked nodes");
        }

        if (!parallel) {
            for (size_t i : sweep_work) nodes_[i]->process_interpretation(substreams[i][pos[i]]);
        } else {
            start_gate->arrive_and_wait();
            done_gate->arrive_and_wait();
            for (size_t w = 0; w < k; ++w) {
                if (worker_errors[w]) {
                    auto err = worker_errors[w];
                    shutdown();
                    std::rethrow_exception(err);
                }
            }
        }
        for (size_t i : sweep_work) ++pos[i];
    }
}

EvalResult evaluate(const Theory& theory, const std::vector<Interpretation>& stream) {
    EvalResult out;
    FluentState state;
    for (const Interpretation& interp : stream) {
        auto labels = classify_instances(theory, interp, state);
        for (const auto& [t, sl] : labels) {
            for (const Term& f : sl.inferred) {
                sl.annotated.count(f) ? ++out.tp : ++out.fp;
            }
            for (const Term& f : sl.annotated) {
                if (!sl.inferred.count(f)) ++out.fn;
            }
        }
    }
    double denom = static_cast<double>(2 * out.tp + out.fp + out.fn);
    out.f1 = denom > 0.0 ? 2.0 * static_cast<double>(out.tp) / denom : 0.0;
    return out;
}

namespace {

// Emission: a clause makes the hypothesis once some replica has watched its
// lineage (the id, across specializations) for warm_up examples AND the
// current body holds the prune bar on its own evidence: its score minus the
// Hoeffding interval over its stable span must reach the prune threshold.
// Without the score gate, a clause that keeps specializing resets its
// stability before the prune rule can ever examine it, and a low-quality
// lineage could ride its age into the hypothesis.
void emit_group(const std::vector<const Theory*>& replicas, const HoeffdingParams& params,
                Theory& into) {
    const Theory& front = *replicas.front();
    auto emit_part = [&](const std::vector<Clause>& clauses) {
        for (const Clause& c : clauses) {
            bool pass = false;
            for (const Theory* t : replicas) {
                const Clause* copy = t->find(c.id);
                if (!copy || copy->lineage_e < params.warm_up || copy->stable_since < 1) continue;
                double margin = hoeffding_epsilon(params.delta, copy->stable_since);
                if (g_score(copy->stats, copy->kind()) - margin >= params.prune_threshold)
                    pass = true;
            }
            if (pass) into.insert(c);
        }
    };
    emit_part(front.initiation);
    emit_part(front.termination);
}

}  // namespace

RunReport learn(const std::vector<Interpretation>& data, const ModeSet& modes,
                const LearnOptions& options) {
    if (options.nodes < 1) throw ConfigError("nodes must be >= 1");
    if (options.transport != "inproc" && options.transport != "socket")
        throw ConfigError("unknown transport: " + options.transport);

    auto substreams = partition(data, options.nodes);

    RunReport report;
    report.nodes = options.nodes;

    // Wall clock from the first interpretation dequeued to the last node
    // quiescent; stream preparation and emission are not training.
    auto t0 = std::chrono::steady_clock::now();
    for (ClauseKind kind : {ClauseKind::Initiation, ClauseKind::Termination}) {
        std::uint64_t group_seed = options.seed ^ (kind == ClauseKind::Termination ? 0x7e7 : 0);
        if (options.transport == "socket") {
            SocketGroupResult res =
                run_socket_group(kind, options.nodes, modes, options.params, group_seed,
                                 options.node_options, substreams, options.socket_host,
                                 options.socket_port);
            std::vector<const Theory*> replicas;
            for (const Theory& t : res.theories) replicas.push_back(&t);
            emit_group(replicas, options.params, report.final_theory);
            report.messages_sent += res.messages;
            report.message_bytes += res.bytes;
            report.clauses_generated += res.clauses_generated;
            report.clauses_pruned += res.clauses_pruned;
            continue;
        }

        InProcGroup group(kind, options.nodes, modes, options.params, group_seed,
                          options.node_options);
        group.run(substreams);
        if (!group.theories_consistent())
            throw ProtocolError("replica theories diverged at quiescence");

        std::vector<const Theory*> replicas;
        for (size_t i = 0; i < group.size(); ++i) replicas.push_back(&group.node(i).theory());
        emit_group(replicas, options.params, report.final_theory);

        report.messages_sent += group.router().messages_delivered();
        report.message_bytes += group.router().bytes_delivered();
        for (size_t i = 0; i < group.size(); ++i)
            report.clauses_generated += group.node(i).metrics().clauses_generated;
        report.clauses_pruned += group.node(0).metrics().clauses_pruned;
    }

    report.training_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.theory_size_literals = report.final_theory.total_literals();

    bool any_positive = false;
    for (const Interpretation& interp : data) {
        if (is_positive(interp)) any_positive = true;
    }
    if (!any_positive) {
        report.no_positives = true;
        report.f1 = 0.0;
    } else {
        EvalResult ev = evaluate(report.final_theory, data);
        report.tp = ev.tp;
        report.fp = ev.fp;
        report.fn = ev.fn;
        report.f1 = ev.f1;
    }
    return report;
}

RunReport cross_validate(const std::vector<Interpretation>& data, const ModeSet& modes, int folds,
                         const LearnOptions& options) {
    if (folds < 2) throw ConfigError("cross-validation needs folds >= 2");
    if (static_cast<size_t>(folds) > data.size())
        throw ConfigError("folds exceed interpretation count");

    RunReport agg;
    agg.nodes = options.nodes;
    agg.folds = folds;
    size_t n = data.size();
    for (int f = 0; f < folds; ++f) {
        size_t lo = n * static_cast<size_t>(f) / static_cast<size_t>(folds);
        size_t hi = n * static_cast<size_t>(f + 1) / static_cast<size_t>(folds);
        std::vector<Interpretation> train;
        std::vector<Interpretation> test;
        for (size_t i = 0; i < n; ++i) {
            (i >= lo && i < hi ? test : train).push_back(data[i]);
        }
        RunReport rep = learn(train, modes, options);
        EvalResult ev = evaluate(rep.final_theory, test);
        agg.tp += ev.tp;
        agg.fp += ev.fp;
        agg.fn += ev.fn;
        agg.training_seconds += rep.training_seconds;
        agg.theory_size_literals += rep.theory_size_literals;
        agg.messages_sent += rep.messages_sent;
        agg.message_bytes += rep.message_bytes;
        agg.clauses_generated += rep.clauses_generated;
        agg.clauses_pruned += rep.clauses_pruned;
        if (f == folds - 1) agg.final_theory = std::move(rep.final_theory);
    }
    double denom = static_cast<double>(2 * agg.tp + agg.fp + agg.fn);
    agg.f1 = denom > 0.0 ? 2.0 * static_cast<double>(agg.tp) / denom : 0.0;
    agg.training_seconds /= folds;
    agg.theory_size_literals /= folds;
    agg.messages_sent /= folds;
    agg.message_bytes /= folds;
    return agg;
}

std::string RunReport::to_kv() const {
    std::ostringstream os;
    os << "nodes=" << nodes << "\n";
    if (folds) os << "folds=" << folds << "\n";
    os << "training_seconds=" << training_seconds << "\n";
    os << "f1=" << f1 << "\n";
    os << "tp=" << tp << "\n";
    os << "fp=" << fp << "\n";
    os << "fn=" << fn << "\n";
    os << "theory_size_literals=" << theory_size_literals << "\n";
    os << "messages_sent=" << messages_sent << "\n";
    os << "message_bytes=" << message_bytes << "\n";
    os << "clauses_generated=" << clauses_generated << "\n";
    os << "clauses_pruned=" << clauses_pruned << "\n";
    if (no_positives) os << "warning=no_positive_interpretations\n";
    return os.str();
}

std::string RunReport::human() const {
    std::ostringstream os;
    os << "nodes:            " << nodes << "\n";
    if (folds) os << "folds:            " << folds << "\n";
    os << "training time:    " << training_seconds << " s\n";
    os << "F1 (micro):       " << f1 << "  (tp=" << tp << " fp=" << fp << " fn=" << fn << ")\n";
    os << "theory size:      " << theory_size_literals << " literals\n";
    os << "messages:         " << messages_sent << " (" << message_bytes << " bytes)\n";
    os << "clauses grown:    " << clauses_generated << ", pruned: " << clauses_pruned << "\n";
    if (no_positives) os << "warning: stream contains no positive interpretations\n";
    os << "theory:\n" << final_theory.render();
    return os.str();
}

}  // namespace eclearn
