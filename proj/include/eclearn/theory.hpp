#pragma once

#include <set>
#include <string>
#include <vector>

#include "eclearn/clause.hpp"

namespace eclearn {

// The replicated hypothesis: initiation and termination clauses keyed by
// globally unique ids. Insertion order is preserved per replica; structural
// equality across replicas is a set comparison.
struct Theory {
    std::vector<Clause> initiation;
    std::vector<Clause> termination;

    Clause* find(ClauseId id);
    const Clause* find(ClauseId id) const;
    bool insert(Clause c);  // false if the id is already present
    bool remove(ClauseId id);
    bool replace(ClauseId id, Clause next);  // keeps the clause's position

    size_t size() const { return initiation.size() + termination.size(); }
    bool empty() const { return initiation.empty() && termination.empty(); }
    long total_literals() const;  // head + body literals over all clauses

    // "id|head :- body." lines; identical across replicas iff the theories
    // are structurally identical.
    std::set<std::string> structure() const;
    std::string render() const;
};

Theory parse_theory(const std::string& text);
Theory load_theory(const std::string& path);

}  // namespace eclearn
