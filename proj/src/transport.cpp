#include "eclearn/transport.hpp"

#include <algorithm>

#include "eclearn/codec.hpp"

namespace eclearn {

void SeqTracker::check(const Envelope& env) {
    auto& prev = last[env.sender];
    if (env.seq <= prev)
        throw ProtocolError("out-of-order message from " + env.sender + ": seq " +
                            std::to_string(env.seq) + " after " + std::to_string(prev));
    prev = env.seq;
}

void Router::attach(const std::string& id, std::function<void(const Envelope&)> handler) {
    handlers_[id] = std::move(handler);
}

void Router::send(Envelope env) {
    env.seq = ++seq_[env.sender];
    size_t bytes = encode_message(env).size();
    log_.push_back({env.msg.type, env.sender, env.to, bytes});
    ++messages_;
    bytes_ += static_cast<long>(bytes);
    if (order_ == Order::Fifo) {
        fifo_.push_back(std::move(env));
        return;
    }
    if (std::find(sender_order_.begin(), sender_order_.end(), env.sender) == sender_order_.end())
        sender_order_.push_back(env.sender);
    by_sender_[env.sender].push_back({++stamp_, std::move(env)});
}

bool Router::idle() const {
    if (!fifo_.empty()) return false;
    for (const auto& [id, q] : by_sender_) {
        if (!q.empty()) return false;
    }
    return true;
}

bool Router::dispatch_one() {
    if (order_ == Order::Fifo) {
        if (fifo_.empty()) return false;
        Envelope env = std::move(fifo_.front());
        fifo_.pop_front();
        recv_seq_.check(env);
        auto it = handlers_.find(env.to);
        if (it == handlers_.end())
            throw ProtocolError("message addressed to unknown endpoint " + env.to);
        it->second(env);
        return true;
    }
    // Pick a sender with pending messages.
    std::vector<std::string> ready;
    for (const std::string& s : sender_order_) {
        auto it = by_sender_.find(s);
        if (it != by_sender_.end() && !it->second.empty()) ready.push_back(s);
    }
    if (ready.empty()) return false;

    std::string pick;
    if (order_ == Order::SeededRandom) {
        pick = ready[rng_.below(ready.size())];
    } else {
        // Global FIFO: the sender whose head message was enqueued first.
        pick = ready.front();
        std::uint64_t best_stamp = ~0ull;
        for (const std::string& s : ready) {
            std::uint64_t stamp = by_sender_[s].front().stamp;
            if (stamp < best_stamp) {
                best_stamp = stamp;
                pick = s;
            }
        }
    }

    Envelope env = std::move(by_sender_[pick].front().env);
    by_sender_[pick].pop_front();
    recv_seq_.check(env);

    auto it = handlers_.find(env.to);
    if (it == handlers_.end())
        throw ProtocolError("message addressed to unknown endpoint " + env.to);
    it->second(env);
    return true;
}

void Router::run_until_idle() {
    while (dispatch_one()) {
    }
}

}  // namespace eclearn
