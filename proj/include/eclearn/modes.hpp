#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eclearn/term.hpp"

namespace eclearn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One argument slot of a mode schema: +type (input variable), -type (output
// variable), #type (constant drawn from the pool named `type`), a nested
// function, or a fixed constant.
struct ModeTerm {
    enum class Kind { Input, Output, Pool, Function, Fixed };
    Kind kind = Kind::Fixed;
    std::string name;            // type name, functor, or constant text
    std::vector<ModeTerm> args;  // Function only
};

struct ModeDeclaration {
    enum class Kind { Head, Body };
    Kind kind = Kind::Body;
    std::string predicate;
    std::vector<ModeTerm> args;
    int recall = 0;  // max instantiations per bottom clause; <= 0 means unbounded
};

struct ModeSet {
    std::vector<ModeDeclaration> heads;
    std::vector<ModeDeclaration> bodies;
    std::map<std::string, std::vector<Term>> pools;  // #type name -> constants

    // Fluent schemas (functor, arity) named by the head modes; these are the
    // learning targets and drive the narrative/annotation split when parsing.
    std::vector<std::pair<std::string, size_t>> target_schemas() const;
    bool is_target(const Term& fluent) const;
};

// File format, one declaration per line:
//   modeh(initiatedAt(moving(+person,+person),+time)).
//   modeb(happensAt(walk(+person),+time)).
//   modeb(3, distLessThan(+person,+person,#dist,+time)).
//   pool(dist, [25,30,40]).
// '%' starts a comment. Throws ConfigError with a line number on bad input.
ModeSet parse_modes(const std::string& text);
ModeSet load_modes(const std::string& path);

}  // namespace eclearn
