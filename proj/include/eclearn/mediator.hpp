#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eclearn/messages.hpp"
#include "eclearn/rng.hpp"
#include "eclearn/transport.hpp"

namespace eclearn {

// Arbitration endpoint: serializes specialize/prune rounds so that nodes
// whose local tests fire simultaneously on overlapping clauses never wait on
// each other. One grant is outstanding at a time; requests arriving meanwhile
// queue, and a queued request is cancelled (with a Proceed from the mediator)
// if its clause was replaced or removed by the round that preceded it.
class Mediator {
   public:
    Mediator(std::string id, std::vector<std::string> nodes, std::uint64_t seed, Sender send);

    void handle(const Envelope& env);
    bool idle() const { return !active_ && queue_.empty(); }
    const std::string& id() const { return id_; }

    long grants() const { return grants_; }
    long cancellations() const { return cancellations_; }

   private:
    struct Pending {
        std::string requester;
        ClauseId clause_id = 0;
        std::string purpose;  // "specialize" | "prune"
        std::uint64_t clause_version = 0;
    };

    void grant(Pending p);
    void pump_queue();
    void send_to(const std::string& to, Message m);

    std::string id_;
    std::vector<std::string> nodes_;
    Rng rng_;
    Sender send_;
    std::optional<Pending> active_;
    std::vector<Pending> queue_;
    std::map<ClauseId, std::uint64_t> version_;
    long grants_ = 0;
    long cancellations_ = 0;
};

}  // namespace eclearn
