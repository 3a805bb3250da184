#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "eclearn/clause.hpp"

namespace eclearn {

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MsgType {
    AddNewClause,
    SpecializeRequest,
    StatsReply,
    Replace,
    Proceed,
    PruneRequest,
    PruneStatsReply,
    Remove,
    MediatorGrant,
    MediatorDone,
};

const char* msg_type_name(MsgType t);
std::optional<MsgType> msg_type_from_name(const std::string& name);

// "specialize" / "prune" on requests and grants; on MediatorDone the field
// carries the round outcome ("replaced", "removed", "kept") so the mediator
// can cancel queued requests for clauses that no longer exist unchanged.
struct Message {
    MsgType type = MsgType::Proceed;
    ClauseId clause_id = 0;
    std::string requester;
    std::string responder;
    std::string purpose;
    std::optional<Clause> clause;  // AddNewClause / Replace payload
    ClauseStats parent_stats;
    std::map<std::string, ClauseStats> refinement_stats;
    long stable_since = 0;  // PruneStatsReply
};

// Transport envelope: per-sender sequence numbers are strictly increasing and
// receivers see each sender's messages in order.
struct Envelope {
    int version = 1;
    std::string sender;
    std::string to;
    std::uint64_t seq = 0;
    Message msg;
};

}  // namespace eclearn
