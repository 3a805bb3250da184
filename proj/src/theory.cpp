#include "eclearn/theory.hpp"

#include <fstream>
#include <sstream>

namespace eclearn {

namespace {

template <typename Vec, typename Fn>
bool for_partition(Vec& init, Vec& term, Fn&& fn) {
    return fn(init) || fn(term);
}

}  // namespace

Clause* Theory::find(ClauseId id) {
    for (Clause& c : initiation) {
        if (c.id == id) return &c;
    }
    for (Clause& c : termination) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const Clause* Theory::find(ClauseId id) const {
    return const_cast<Theory*>(this)->find(id);
}

bool Theory::insert(Clause c) {
    if (find(c.id)) return false;
    auto& part = c.kind() == ClauseKind::Initiation ? initiation : termination;
    part.push_back(std::move(c));
    return true;
}

bool Theory::remove(ClauseId id) {
    auto erase_from = [id](std::vector<Clause>& v) {
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (it->id == id) {
                v.erase(it);
                return true;
            }
        }
        return false;
    };
    return for_partition(initiation, termination, erase_from);
}

bool Theory::replace(ClauseId id, Clause next) {
    auto swap_in = [&](std::vector<Clause>& v) {
        for (Clause& c : v) {
            if (c.id == id) {
                c = std::move(next);
                return true;
            }
        }
        return false;
    };
    return for_partition(initiation, termination, swap_in);
}

long Theory::total_literals() const {
    long n = 0;
    for (const Clause& c : initiation) n += 1 + static_cast<long>(c.body.size());
    for (const Clause& c : termination) n += 1 + static_cast<long>(c.body.size());
    return n;
}

std::set<std::string> Theory::structure() const {
    std::set<std::string> out;
    for (const Clause& c : initiation) out.insert(std::to_string(c.id) + "|" + render_clause(c));
    for (const Clause& c : termination) out.insert(std::to_string(c.id) + "|" + render_clause(c));
    return out;
}

std::string Theory::render() const {
    std::ostringstream os;
    for (const Clause& c : initiation) os << render_clause(c) << "\n";
    for (const Clause& c : termination) os << render_clause(c) << "\n";
    return os.str();
}

Theory parse_theory(const std::string& text) {
    Theory t;
    std::istringstream in(text);
    std::string line;
    long counter = 0;
    while (std::getline(in, line)) {
        size_t comment = line.find('%');
        if (comment != std::string::npos) line.erase(comment);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        Clause c = parse_clause(line);
        c.id = make_clause_id("theory", counter++);
        if (c.head.predicate != "initiatedAt" && c.head.predicate != "terminatedAt")
            throw ConfigError("theory clause head must be initiatedAt or terminatedAt: " + line);
        t.insert(std::move(c));
    }
    return t;
}

Theory load_theory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open theory file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_theory(ss.str());
}

}  // namespace eclearn
