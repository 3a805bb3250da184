#include "eclearn/mediator.hpp"

namespace eclearn {

Mediator::Mediator(std::string id, std::vector<std::string> nodes, std::uint64_t seed, Sender send)
    : id_(std::move(id)), nodes_(std::move(nodes)), rng_(seed), send_(std::move(send)) {}

void Mediator::send_to(const std::string& to, Message m) {
    Envelope env;
    env.sender = id_;
    env.to = to;
    env.msg = std::move(m);
    send_(std::move(env));
}

void Mediator::handle(const Envelope& env) {
    const Message& m = env.msg;
    switch (m.type) {
        case MsgType::SpecializeRequest:
        case MsgType::PruneRequest: {
            Pending p;
            p.requester = m.requester.empty() ? env.sender : m.requester;
            p.clause_id = m.clause_id;
            p.purpose = m.type == MsgType::SpecializeRequest ? "specialize" : "prune";
            p.clause_version = version_[m.clause_id];
            if (active_)
                queue_.push_back(std::move(p));
            else
                grant(std::move(p));
            return;
        }
        case MsgType::MediatorDone: {
            if (!active_ || active_->requester != env.sender)
                throw ProtocolError("MediatorDone from non-granted node " + env.sender);
            if (m.purpose == "replaced" || m.purpose == "removed") ++version_[m.clause_id];
            active_.reset();
            pump_queue();
            return;
        }
        default:
            throw ProtocolError(std::string("mediator cannot handle message type ") +
                                msg_type_name(m.type));
    }
}

void Mediator::grant(Pending p) {
    ++grants_;
    active_ = p;

    Message grant_note;
    grant_note.type = MsgType::MediatorGrant;
    grant_note.clause_id = p.clause_id;
    grant_note.requester = p.requester;
    grant_note.purpose = p.purpose;
    send_to(p.requester, grant_note);

    Message relayed;
    relayed.type =
        p.purpose == "specialize" ? MsgType::SpecializeRequest : MsgType::PruneRequest;
    relayed.clause_id = p.clause_id;
    relayed.requester = p.requester;
    relayed.purpose = p.purpose;
    for (const std::string& n : nodes_) {
        if (n != p.requester) send_to(n, relayed);
    }
}

void Mediator::pump_queue() {
    // Cancel requests whose clause changed since they were enqueued.
    std::vector<Pending> keep;
    for (Pending& p : queue_) {
        if (version_[p.clause_id] != p.clause_version) {
            Message abandon;
            abandon.type = MsgType::Proceed;
            abandon.clause_id = p.clause_id;
            abandon.requester = p.requester;
            send_to(p.requester, abandon);
            ++cancellations_;
        } else {
            keep.push_back(std::move(p));
        }
    }
    queue_ = std::move(keep);
    if (queue_.empty() || active_) return;

    size_t pick = static_cast<size_t>(rng_.below(queue_.size()));
    Pending next = std::move(queue_[pick]);
    queue_.erase(queue_.begin() + static_cast<long>(pick));
    grant(std::move(next));
}

}  // namespace eclearn
