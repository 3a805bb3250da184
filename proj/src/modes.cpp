#include "eclearn/modes.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "eclearn/parse.hpp"

namespace eclearn {

namespace {

struct ModeCursor {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
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
    std::string ident() {
        skip_ws();
        size_t start = pos;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+') && pos + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[pos + 1])))
            ++pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                (text[pos] == '.' && pos + 1 < text.size() &&
                 std::isdigit(static_cast<unsigned char>(text[pos + 1])))))
            ++pos;
        if (pos == start) throw ParseError("expected identifier", pos);
        return std::string(text.substr(start, pos - start));
    }

    ModeTerm mode_term() {
        skip_ws();
        if (accept('+')) return ModeTerm{ModeTerm::Kind::Input, ident(), {}};
        if (accept('-')) return ModeTerm{ModeTerm::Kind::Output, ident(), {}};
        if (accept('#')) return ModeTerm{ModeTerm::Kind::Pool, ident(), {}};
        std::string name = ident();
        if (accept('(')) {
            std::vector<ModeTerm> args;
            args.push_back(mode_term());
            while (accept(',')) args.push_back(mode_term());
            expect(')');
            return ModeTerm{ModeTerm::Kind::Function, std::move(name), std::move(args)};
        }
        return ModeTerm{ModeTerm::Kind::Fixed, std::move(name), {}};
    }
};

ModeDeclaration parse_mode_decl(std::string_view inner, ModeDeclaration::Kind kind) {
    ModeCursor c{inner};
    ModeDeclaration decl;
    decl.kind = kind;

    c.skip_ws();
    if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
        decl.recall = std::stoi(c.ident());
        c.expect(',');
    }
    decl.predicate = c.ident();
    if (c.accept('(')) {
        decl.args.push_back(c.mode_term());
        while (c.accept(',')) decl.args.push_back(c.mode_term());
        c.expect(')');
    }
    c.skip_ws();
    if (c.pos != inner.size()) throw ParseError("trailing input in mode declaration", c.pos);
    return decl;
}

// Extracts the argument text of "wrapper( ... )." on one line.
std::string unwrap(const std::string& line, const std::string& wrapper) {
    size_t open = line.find('(');
    size_t close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("malformed " + wrapper + " declaration", 0);
    return line.substr(open + 1, close - open - 1);
}

void collect_pool_types(const ModeTerm& mt, std::vector<std::string>& out) {
    if (mt.kind == ModeTerm::Kind::Pool) out.push_back(mt.name);
    for (const ModeTerm& a : mt.args) collect_pool_types(a, out);
}

}  // namespace

std::vector<std::pair<std::string, size_t>> ModeSet::target_schemas() const {
    std::vector<std::pair<std::string, size_t>> out;
    for (const ModeDeclaration& h : heads) {
        if (h.args.empty() || h.args[0].kind != ModeTerm::Kind::Function) continue;
        std::pair<std::string, size_t> schema{h.args[0].name, h.args[0].args.size()};
        bool seen = false;
        for (const auto& s : out) {
            if (s == schema) seen = true;
        }
        if (!seen) out.push_back(schema);
    }
    return out;
}

bool ModeSet::is_target(const Term& fluent) const {
    if (!fluent.is_func()) return false;
    for (const auto& [name, arity] : target_schemas()) {
        if (fluent.name == name && fluent.args.size() == arity) return true;
    }
    return false;
}

ModeSet parse_modes(const std::string& text) {
    ModeSet out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t comment = line.find('%');
        if (comment != std::string::npos) line.erase(comment);
        size_t first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        try {
            if (line.compare(first, 5, "modeh") == 0) {
                out.heads.push_back(parse_mode_decl(unwrap(line, "modeh"), ModeDeclaration::Kind::Head));
            } else if (line.compare(first, 5, "modeb") == 0) {
                out.bodies.push_back(parse_mode_decl(unwrap(line, "modeb"), ModeDeclaration::Kind::Body));
            } else if (line.compare(first, 4, "pool") == 0) {
                std::string inner = unwrap(line, "pool");
                size_t comma = inner.find(',');
                size_t lb = inner.find('[');
                size_t rb = inner.rfind(']');
                if (comma == std::string::npos || lb == std::string::npos || rb == std::string::npos)
                    throw ParseError("malformed pool declaration", 0);
                std::string type = inner.substr(0, comma);
                type.erase(0, type.find_first_not_of(" \t"));
                type.erase(type.find_last_not_of(" \t") + 1);
                std::vector<Term>& pool = out.pools[type];
                std::string items = inner.substr(lb + 1, rb - lb - 1);
                std::istringstream is(items);
                std::string item;
                while (std::getline(is, item, ',')) {
                    item.erase(0, item.find_first_not_of(" \t"));
                    item.erase(item.find_last_not_of(" \t") + 1);
                    if (!item.empty()) pool.push_back(Term::constant(item));
                }
            } else {
                throw ParseError("unknown declaration", first);
            }
        } catch (const ParseError& e) {
            throw ConfigError("modes line " + std::to_string(lineno) + ": " + e.what());
        }
    }

    // Head modes must define initiation/termination schemas, and every #type
    // must name a non-empty pool.
    for (const ModeDeclaration& h : out.heads) {
        if (h.predicate != "initiatedAt" && h.predicate != "terminatedAt")
            throw ConfigError("head mode predicate must be initiatedAt or terminatedAt, got " +
                              h.predicate);
    }
    std::vector<std::string> pool_types;
    for (const ModeDeclaration& m : out.bodies) {
        for (const ModeTerm& a : m.args) collect_pool_types(a, pool_types);
    }
    for (const std::string& t : pool_types) {
        auto it = out.pools.find(t);
        if (it == out.pools.end() || it->second.empty())
            throw ConfigError("#" + t + " used in a mode but pool(" + t + ", [...]). is missing");
    }
    return out;
}

ModeSet load_modes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open modes file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_modes(ss.str());
}

}  // namespace eclearn
