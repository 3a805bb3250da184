#include "eclearn/node.hpp"

#include <algorithm>
#include <cassert>

namespace eclearn {

LearnerNode::LearnerNode(std::string id, ClauseKind kind, const ModeSet& modes,
                         HoeffdingParams params, std::vector<std::string> peers,
                         std::string mediator, Sender send, NodeOptions options)
    : id_(std::move(id)),
      kind_(kind),
      modes_(&modes),
      params_(params),
      peers_(std::move(peers)),
      mediator_(std::move(mediator)),
      send_(std::move(send)),
      opt_(options) {}

Phase LearnerNode::phase() const {
    if (my_round_) return Phase::AwaitingStats;
    if (!pending_verdicts_.empty()) return Phase::AwaitingVerdict;
    return Phase::Running;
}

std::vector<Clause>& LearnerNode::own_clauses() {
    return kind_ == ClauseKind::Initiation ? theory_.initiation : theory_.termination;
}

void LearnerNode::send_to(const std::string& to, Message m) {
    Envelope env;
    env.sender = id_;
    env.to = to;
    env.msg = std::move(m);
    send_(std::move(env));
}

void LearnerNode::broadcast_to_peers(Message m) {
    for (const std::string& p : peers_) send_to(p, m);
}

// ── Stream processing ────────────────────────────────────────────────────────

void LearnerNode::process_interpretation(const Interpretation& interp) {
    if (blocked()) throw std::logic_error("node " + id_ + " fed input while blocked");
    ++metrics_.interpretations;

    auto trigger = score_window(interp);
    if (opt_.generation && trigger) generate_clause(interp, *trigger);

    if (peers_.empty())
        local_structural_ops();
    else
        try_start_round();
}

// Classifies the window against this group's clauses, updating clause and
// candidate counters per firing, and returns the earliest instance that calls
// for a new clause. The held-state is seeded from the annotation at the
// window start, so windows are self-contained and counts are invariant under
// stream partitioning.
std::optional<LearnerNode::Trigger> LearnerNode::score_window(const Interpretation& interp) {
    std::optional<Trigger> trigger;
    FluentState state{interp.annotation_at(interp.t_start)};
    std::vector<Clause>& mine = own_clauses();

    // Candidate machinery is stable within a window: hoist the bodies, and
    // when every variable of the appended literal is already bound by the
    // head, a parent firing needs only that literal re-checked.
    struct CandEval {
        ClauseStats* stats;
        bool single;
        std::vector<Literal> body;  // the full candidate body, or just the literal
    };
    std::vector<std::vector<CandEval>> cand_evals(mine.size());
    for (size_t i = 0; i < mine.size(); ++i) {
        Clause& c = mine[i];
        std::vector<std::string> head_vars;
        collect_vars(c.head, head_vars);
        for (const Clause::Candidate& cand : c.candidates()) {
            auto it = c.refinement_stats.find(cand.key);
            if (it == c.refinement_stats.end()) continue;
            std::vector<std::string> lit_vars;
            collect_vars(cand.lit, lit_vars);
            bool single = std::all_of(lit_vars.begin(), lit_vars.end(), [&](const std::string& v) {
                return std::find(head_vars.begin(), head_vars.end(), v) != head_vars.end();
            });
            CandEval eval{&it->second, single, {}};
            if (single) {
                eval.body.push_back(cand.lit);
            } else {
                eval.body = c.body;
                eval.body.push_back(cand.lit);
            }
            cand_evals[i].push_back(std::move(eval));
        }
    }

    for (TimePoint t = interp.t_start; t <= interp.t_end; ++t) {
        std::set<Term> ann_next = interp.annotation_at(t + 1);
        const Term time_term = Term::number(static_cast<double>(t));
        // Instance sets per fluent schema, shared by all clauses at this t.
        std::map<Term, std::set<Term>> instance_cache;
        std::set<Term> combined;

        for (size_t i = 0; i < mine.size(); ++i) {
            Clause& c = mine[i];
            auto bump = [&](ClauseStats& s, const Term& f) {
                if (kind_ == ClauseKind::Initiation) {
                    ann_next.count(f) ? ++s.tp : ++s.fp;
                } else {
                    // A termination firing is penalized when the fluent is
                    // still annotated at T+1 and rewarded when it stopped a
                    // fluent that was actually holding.
                    if (ann_next.count(f))
                        ++s.fn;
                    else if (state.holds(f))
                        ++s.tp;
                }
            };
            auto cache_it = instance_cache.find(c.target_fluent());
            if (cache_it == instance_cache.end())
                cache_it = instance_cache
                               .emplace(c.target_fluent(),
                                        ground_instances(c.target_fluent(), interp, t))
                               .first;
            for (const Term& f : cache_it->second) {
                auto theta = head_binding(c.head, f, time_term);
                if (!theta) continue;
                CoverageQuery query(std::move(*theta));
                if (!query.covers(c.body, interp, t)) continue;
                combined.insert(f);
                bump(c.stats, f);
                for (CandEval& cand : cand_evals[i]) {
                    if (query.covers(cand.body, interp, t)) bump(*cand.stats, f);
                }
            }
        }
        FluentState next = kind_ == ClauseKind::Initiation ? step_infer(state, combined, {})
                                                           : step_infer(state, {}, combined);

        if (!trigger) {
            if (kind_ == ClauseKind::Initiation) {
                // Annotated fluent neither initiated nor persisting: an FN no
                // current clause accounts for.
                for (const Term& f : ann_next) {
                    if (!next.holds(f)) {
                        trigger = Trigger{f, t};
                        break;
                    }
                }
            } else {
                // Fluent persisted by inertia although the annotation dropped
                // it: an FP caused by a missing termination.
                for (const Term& f : state.holding) {
                    if (next.holds(f) && !ann_next.count(f)) {
                        trigger = Trigger{f, t};
                        break;
                    }
                }
            }
        }
        state = std::move(next);
    }

    for (Clause& c : mine) {
        ++c.stats.e;
        ++c.stable_since;
        ++c.lineage_e;
        for (auto& [key, st] : c.refinement_stats) ++st.e;
    }
    return trigger;
}

void LearnerNode::generate_clause(const Interpretation& interp, const Trigger& trigger) {
    auto bottom = std::make_shared<BottomClause>(
        construct_bottom(interp, trigger.time, trigger.fluent, kind_, *modes_));
    Clause c = make_root_clause(make_clause_id(id_, clause_seq_++), bottom);
    if (!theory_.insert(c)) return;
    ++metrics_.clauses_generated;

    Message m;
    m.type = MsgType::AddNewClause;
    m.clause_id = c.id;
    m.clause = c;
    broadcast_to_peers(std::move(m));
}

// ── Structural changes, single-node path ─────────────────────────────────────

// A clause none of whose candidates outscores it cannot specialize any
// further; only such clauses are candidates for pruning, so a lineage that is
// still climbing is never cut down mid-growth.
bool LearnerNode::locally_unimprovable(const Clause& c) const {
    double parent = g_score(c.stats, kind_);
    for (const auto& [key, st] : c.refinement_stats) {
        if (g_score(st, kind_) > parent) return false;
    }
    return true;
}

void LearnerNode::record_specialization(long n) {
    ++spec_count_;
    avg_spec_n_ += (static_cast<double>(n) - avg_spec_n_) / static_cast<double>(spec_count_);
}

void LearnerNode::local_structural_ops() {
    std::vector<Clause>& mine = own_clauses();
    if (opt_.specialization) {
        for (Clause& c : mine) {
            Decision d = hoeffding_decision(c.stats, c.refinement_stats, kind_, params_);
            if (d.action == Decision::Action::Specialize) {
                long n = c.stats.e;
                long lineage = c.lineage_e;
                c = specialize_with(c, d.candidate_key);
                c.lineage_e = lineage;
                record_specialization(n);
                ++metrics_.clauses_replaced;
            }
        }
    }
    if (opt_.pruning) {
        for (auto it = mine.begin(); it != mine.end();) {
            if (locally_unimprovable(*it) &&
                should_prune(it->stats, kind_, it->stable_since, avg_specialization_n(), params_)) {
                tombstones_.insert(it->id);
                ledger_.clear_clause(it->id);
                ++metrics_.clauses_pruned;
                it = mine.erase(it);
            } else {
                ++it;
            }
        }
    }
}

// ── Structural changes, distributed path ─────────────────────────────────────

void LearnerNode::try_start_round() {
    std::vector<Clause>& mine = own_clauses();
    if (opt_.specialization) {
        for (Clause& c : mine) {
            Decision d = hoeffding_decision(c.stats, c.refinement_stats, kind_, params_);
            if (d.action == Decision::Action::Specialize) {
                start_round(c.id, "specialize");
                return;  // one outstanding request at a time
            }
        }
    }
    if (opt_.pruning) {
        for (Clause& c : mine) {
            if (locally_unimprovable(c) &&
                should_prune(c.stats, kind_, c.stable_since, avg_specialization_n(), params_)) {
                start_round(c.id, "prune");
                return;
            }
        }
    }
}

void LearnerNode::start_round(ClauseId id, const std::string& purpose) {
    assert(!my_round_);
    my_round_ = Round{id, purpose, {}};
    ++metrics_.rounds_started;

    Message m;
    m.type = purpose == "specialize" ? MsgType::SpecializeRequest : MsgType::PruneRequest;
    m.clause_id = id;
    m.requester = id_;
    m.purpose = purpose;
    send_to(mediator_, std::move(m));
}

void LearnerNode::force_request(ClauseId id, const std::string& purpose) {
    if (my_round_) throw std::logic_error("force_request: a round is already open");
    start_round(id, purpose);
}

void LearnerNode::reply_stats(const Envelope& env) {
    const Message& req = env.msg;
    Message reply;
    reply.type = req.type == MsgType::SpecializeRequest ? MsgType::StatsReply
                                                        : MsgType::PruneStatsReply;
    reply.clause_id = req.clause_id;
    reply.responder = id_;
    if (const Clause* c = theory_.find(req.clause_id)) {
        reply.parent_stats = c->stats;
        reply.stable_since = c->stable_since;
        if (reply.type == MsgType::StatsReply) reply.refinement_stats = c->refinement_stats;
    }
    send_to(req.requester, std::move(reply));
    // Block until the requester's verdict.
    pending_verdicts_.insert(req.clause_id);
}

void LearnerNode::finish_round() {
    Round round = std::move(*my_round_);
    my_round_.reset();

    Clause* c = theory_.find(round.clause_id);
    if (!c) {
        // Clause vanished between request and grant; close the round as a
        // no-op so peers unblock.
        Message nop;
        nop.type = MsgType::Proceed;
        nop.clause_id = round.clause_id;
        broadcast_to_peers(nop);
        Message done;
        done.type = MsgType::MediatorDone;
        done.clause_id = round.clause_id;
        done.purpose = "kept";
        send_to(mediator_, std::move(done));
        after_unblock();
        return;
    }

    long stable_total = c->stable_since;
    for (const Message& reply : round.replies) {
        merge_reply(c->stats, c->refinement_stats, ledger_, reply);
        stable_total += reply.stable_since;
    }

    std::string outcome = "kept";
    if (round.purpose == "specialize") {
        Decision d = hoeffding_decision(c->stats, c->refinement_stats, kind_, params_);
        if (d.action == Decision::Action::Specialize) {
            long n = c->stats.e;
            Clause next = specialize_with(*c, d.candidate_key);
            Message m;
            m.type = MsgType::Replace;
            m.clause_id = round.clause_id;
            m.clause = next;
            broadcast_to_peers(std::move(m));
            apply_replace(round.clause_id, std::move(next));
            record_specialization(n);
            outcome = "replaced";
        }
    } else {
        if (should_prune(c->stats, kind_, stable_total, avg_specialization_n(), params_)) {
            Message m;
            m.type = MsgType::Remove;
            m.clause_id = round.clause_id;
            broadcast_to_peers(std::move(m));
            apply_remove(round.clause_id);
            outcome = "removed";
        }
    }
    if (outcome == "kept") {
        Message m;
        m.type = MsgType::Proceed;
        m.clause_id = round.clause_id;
        broadcast_to_peers(std::move(m));
    }

    Message done;
    done.type = MsgType::MediatorDone;
    done.clause_id = round.clause_id;
    done.purpose = outcome;
    send_to(mediator_, std::move(done));
    after_unblock();
}

// ── Theory mutation ──────────────────────────────────────────────────────────

void LearnerNode::apply_add(const Clause& c) {
    if (tombstones_.count(c.id)) return;
    Clause fresh = c;
    fresh.stats = {};
    fresh.stable_since = 0;
    fresh.reset_refinements();
    theory_.insert(std::move(fresh));  // no-op if the id is already present
}

void LearnerNode::apply_replace(ClauseId id, Clause next) {
    if (tombstones_.count(id)) return;
    next.id = id;
    next.stats = {};
    next.stable_since = 0;
    if (const Clause* old = theory_.find(id)) next.lineage_e = old->lineage_e;
    next.reset_refinements();
    if (!theory_.replace(id, next)) {
        // Replace can outrun the AddNewClause that introduced the clause;
        // the replacement supersedes it.
        theory_.insert(std::move(next));
    }
    ledger_.clear_clause(id);
    ++metrics_.clauses_replaced;
}

void LearnerNode::apply_remove(ClauseId id) {
    if (theory_.remove(id)) ++metrics_.clauses_pruned;
    tombstones_.insert(id);
    ledger_.clear_clause(id);
}

// ── Inbox ────────────────────────────────────────────────────────────────────

void LearnerNode::handle(const Envelope& env) {
    const Message& m = env.msg;
    switch (m.type) {
        case MsgType::AddNewClause:
            if (blocked()) {
                pending_.push_back(env);
                return;
            }
            apply_add(*m.clause);
            return;

        case MsgType::SpecializeRequest:
        case MsgType::PruneRequest:
            // A requester blocked on its own round must still answer the
            // prioritized node; a node waiting for a verdict defers.
            if (!my_round_ && !pending_verdicts_.empty()) {
                pending_.push_back(env);
                return;
            }
            reply_stats(env);
            return;

        case MsgType::StatsReply:
        case MsgType::PruneStatsReply: {
            if (!my_round_ || my_round_->clause_id != m.clause_id)
                throw ProtocolError("unexpected stats reply at " + id_);
            my_round_->replies.push_back(m);
            if (my_round_->replies.size() == peers_.size()) finish_round();
            return;
        }

        case MsgType::Replace:
            apply_replace(m.clause_id, *m.clause);
            pending_verdicts_.erase(m.clause_id);
            after_unblock();
            return;

        case MsgType::Remove:
            apply_remove(m.clause_id);
            pending_verdicts_.erase(m.clause_id);
            after_unblock();
            return;

        case MsgType::Proceed:
            if (env.sender == mediator_) {
                // Our queued request was cancelled: the clause was changed by
                // the round that preceded it.
                if (!my_round_ || my_round_->clause_id != m.clause_id)
                    throw ProtocolError("mediator cancellation for unknown round at " + id_);
                my_round_.reset();
                ++metrics_.rounds_abandoned;
            } else {
                pending_verdicts_.erase(m.clause_id);
            }
            after_unblock();
            return;

        case MsgType::MediatorGrant:
            return;  // informational

        case MsgType::MediatorDone:
            throw ProtocolError("node received MediatorDone");
    }
}

void LearnerNode::after_unblock() {
    while (!blocked() && !pending_.empty()) {
        Envelope env = std::move(pending_.front());
        pending_.pop_front();
        handle(env);
    }
}

}  // namespace eclearn
