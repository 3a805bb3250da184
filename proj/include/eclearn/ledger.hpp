#pragma once

#include <map>
#include <string>
#include <tuple>

#include "eclearn/messages.hpp"

namespace eclearn {

// Reserved refinement key for a clause's own (parent) counters.
inline const std::string kParentKey = "";

// Per-peer record of the last counts received, so repeated replies merge
// without double counting.
struct PeerLedger {
    using Key = std::tuple<std::string, ClauseId, std::string>;  // peer, clause, candidate
    std::map<Key, ClauseStats> last;

    const ClauseStats* lookup(const std::string& peer, ClauseId id, const std::string& key) const;
    void clear_clause(ClauseId id);
};

// Adds the delta between `incoming` and the peer's previous counts to
// `local`, then records `incoming` in the ledger. Throws ProtocolError if any
// counter went backward.
void merge_one(ClauseStats& local, PeerLedger& ledger, const std::string& peer, ClauseId id,
               const std::string& key, const ClauseStats& incoming);

// Merges a StatsReply / PruneStatsReply: the parent counters and every
// refinement key present both in the reply and locally.
void merge_reply(ClauseStats& local_parent, std::map<std::string, ClauseStats>& local_refinements,
                 PeerLedger& ledger, const Message& reply);

}  // namespace eclearn
