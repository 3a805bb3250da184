#pragma once

#include <string>
#include <vector>

#include "eclearn/data.hpp"
#include "eclearn/modes.hpp"
#include "eclearn/node.hpp"
#include "eclearn/theory.hpp"

namespace eclearn {

// Outcome of one learner group run over TCP: final replica theories in node
// order plus transport accounting (frames carried by the hub).
struct SocketGroupResult {
    std::vector<Theory> theories;
    long messages = 0;
    long bytes = 0;
    long clauses_generated = 0;
    long clauses_pruned = 0;
};

// Runs one learner group with k node threads connected by length-prefixed
// frames over TCP to a hub thread that routes messages and hosts the
// mediator. port 0 binds an ephemeral port. Throws TransportError on socket
// failures.
SocketGroupResult run_socket_group(ClauseKind kind, int k, const ModeSet& modes,
                                   const HoeffdingParams& params, std::uint64_t seed,
                                   NodeOptions options,
                                   const std::vector<std::vector<Interpretation>>& substreams,
                                   const std::string& host, int port);

}  // namespace eclearn
