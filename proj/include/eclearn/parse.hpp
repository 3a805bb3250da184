#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "eclearn/term.hpp"

namespace eclearn {

// Raised on malformed terms, atoms, clause or mode text. `pos` is the byte
// offset into the parsed string.
struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& what, size_t p) : std::runtime_error(what), pos(p) {}
};

// Prolog-style syntax: identifiers starting with an uppercase letter or '_'
// are variables, numeric tokens and lowercase identifiers are constants,
// f(t1,...,tn) is a function term.
Term parse_term(std::string_view text);
Atom parse_atom(std::string_view text);

struct ParsedClause {
    Atom head;
    std::vector<Literal> body;
};

// "head." or "head :- lit1, lit2, ..., litn."  (trailing '.' optional)
ParsedClause parse_clause_text(std::string_view text);

}  // namespace eclearn
