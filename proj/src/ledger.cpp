#include "eclearn/ledger.hpp"

namespace eclearn {

const ClauseStats* PeerLedger::lookup(const std::string& peer, ClauseId id,
                                      const std::string& key) const {
    auto it = last.find({peer, id, key});
    return it == last.end() ? nullptr : &it->second;
}

void PeerLedger::clear_clause(ClauseId id) {
    for (auto it = last.begin(); it != last.end();) {
        if (std::get<1>(it->first) == id)
            it = last.erase(it);
        else
            ++it;
    }
}

void merge_one(ClauseStats& local, PeerLedger& ledger, const std::string& peer, ClauseId id,
               const std::string& key, const ClauseStats& incoming) {
    ClauseStats prev;
    if (const ClauseStats* p = ledger.lookup(peer, id, key)) prev = *p;
    if (incoming.tp < prev.tp || incoming.fp < prev.fp || incoming.fn < prev.fn ||
        incoming.e < prev.e)
        throw ProtocolError("peer " + peer + " counters went backward for clause " +
                            std::to_string(id));
    local.tp += incoming.tp - prev.tp;
    local.fp += incoming.fp - prev.fp;
    local.fn += incoming.fn - prev.fn;
    local.e += incoming.e - prev.e;
    ledger.last[{peer, id, key}] = incoming;
}

void merge_reply(ClauseStats& local_parent, std::map<std::string, ClauseStats>& local_refinements,
                 PeerLedger& ledger, const Message& reply) {
    merge_one(local_parent, ledger, reply.responder, reply.clause_id, kParentKey,
              reply.parent_stats);
    for (const auto& [key, incoming] : reply.refinement_stats) {
        auto it = local_refinements.find(key);
        if (it == local_refinements.end()) continue;  // candidate set drifted; skip
        merge_one(it->second, ledger, reply.responder, reply.clause_id, key, incoming);
    }
}

}  // namespace eclearn
