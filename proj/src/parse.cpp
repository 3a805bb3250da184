#include "eclearn/parse.hpp"

#include <cctype>

namespace eclearn {

namespace {

struct Cursor {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }
    bool accept_seq(std::string_view s) {
        skip_ws();
        if (text.substr(pos, s.size()) == s) {
            pos += s.size();
            return true;
        }
        return false;
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+') && pos + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
            ++pos;  // signed number
        }
        while (pos < text.size() && (ident_char(text[pos]) || text[pos] == '.')) {
            // a '.' only continues a numeric token (decimal point)
            if (text[pos] == '.' &&
                !(pos + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + 1]))))
                break;
            ++pos;
        }
        if (pos == start) throw ParseError("expected identifier", pos);
        return std::string(text.substr(start, pos - start));
    }

    Term term() {
        std::string name = ident();
        bool is_variable = std::isupper(static_cast<unsigned char>(name[0])) || name[0] == '_';
        if (accept('(')) {
            if (is_variable) throw ParseError("variable used as functor: " + name, pos);
            std::vector<Term> args;
            if (!accept(')')) {
                args.push_back(term());
                while (accept(',')) args.push_back(term());
                expect(')');
            }
            return Term::func(std::move(name), std::move(args));
        }
        return is_variable ? Term::var(std::move(name)) : Term::constant(std::move(name));
    }

    Atom atom() {
        Term t = term();
        if (t.is_var()) throw ParseError("atom cannot be a variable", pos);
        Atom a;
        a.predicate = std::move(t.name);
        a.args = std::move(t.args);
        return a;
    }
};

}  // namespace

Term parse_term(std::string_view text) {
    Cursor c{text};
    Term t = c.term();
    if (!c.eof()) throw ParseError("trailing input after term", c.pos);
    return t;
}

Atom parse_atom(std::string_view text) {
    Cursor c{text};
    Atom a = c.atom();
    c.accept('.');
    if (!c.eof()) throw ParseError("trailing input after atom", c.pos);
    return a;
}

ParsedClause parse_clause_text(std::string_view text) {
    Cursor c{text};
    ParsedClause out;
    out.head = c.atom();
    if (c.accept_seq(":-")) {
        out.body.push_back(c.atom());
        while (c.accept(',')) out.body.push_back(c.atom());
    }
    c.accept('.');
    if (!c.eof()) throw ParseError("trailing input after clause", c.pos);
    return out;
}

}  // namespace eclearn
