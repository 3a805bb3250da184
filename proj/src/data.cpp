#include "eclearn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "eclearn/infer.hpp"
#include "eclearn/parse.hpp"
#include "eclearn/rng.hpp"

namespace eclearn {

bool StreamSpec::is_target(const Term& fluent) const {
    if (!fluent.is_func()) return false;
    for (const auto& [name, arity] : targets) {
        if (fluent.name == name && fluent.args.size() == arity) return true;
    }
    return false;
}

bool is_positive(const Interpretation& interp) {
    return interp.has_annotation_in(interp.t_start + 1, interp.t_end + 1);
}

std::vector<Interpretation> parse_stream(const std::string& text, const StreamSpec& spec) {
    if (spec.chunk_size < 1) throw DataError("chunk size must be >= 1");

    struct Fact {
        Atom atom;
        TimePoint time;
        bool annotation;
    };
    std::vector<Fact> facts;

    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    TimePoint prev_time = std::numeric_limits<TimePoint>::min();
    while (std::getline(in, line)) {
        ++lineno;
        size_t comment = line.find('%');
        if (comment != std::string::npos) line.erase(comment);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

        Atom a;
        try {
            a = parse_atom(line);
        } catch (const ParseError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
        auto t = atom_time(a);
        if (!t) throw DataError("line " + std::to_string(lineno) + ": fact has no time stamp");
        if (*t < prev_time)
            throw DataError("line " + std::to_string(lineno) + ": non-monotone time stamp");
        prev_time = *t;

        bool annotation =
            a.predicate == "holdsAt" && a.args.size() == 2 && spec.is_target(a.args[0]);
        facts.push_back({std::move(a), *t, annotation});
    }
    if (facts.empty()) return {};

    TimePoint t0 = std::numeric_limits<TimePoint>::max();
    TimePoint t_max = std::numeric_limits<TimePoint>::min();
    for (const Fact& f : facts) {
        if (!f.annotation) {
            t0 = std::min(t0, f.time);
            t_max = std::max(t_max, f.time);
        }
    }
    if (t0 > t_max) throw DataError("stream contains no narrative facts");

    long windows = (t_max - t0) / spec.chunk_size + 1;
    std::vector<Interpretation> out(static_cast<size_t>(windows));
    for (long i = 0; i < windows; ++i) {
        out[i].id = i;
        out[i].t_start = t0 + i * spec.chunk_size;
        out[i].t_end = std::min(t_max, out[i].t_start + spec.chunk_size - 1);
    }
    auto window_of = [&](TimePoint t) -> long { return (t - t0) / spec.chunk_size; };
    for (Fact& f : facts) {
        if (!f.annotation) {
            out[window_of(f.time)].narrative.push_back(std::move(f.atom));
            continue;
        }
        // An annotation point labels the window ending just before it and
        // seeds the window starting at it.
        long label = f.time > t0 ? window_of(f.time - 1) : -1;
        long seed = f.time <= t_max ? window_of(f.time) : -1;
        if (label >= 0 && label < windows) out[label].annotation.push_back(f.atom);
        if (seed >= 0 && seed < windows && seed != label)
            out[seed].annotation.push_back(std::move(f.atom));
    }
    for (Interpretation& interp : out) interp.finalize();
    return out;
}

std::vector<Interpretation> load_stream(const std::string& path, const StreamSpec& spec) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_stream(ss.str(), spec);
}

std::string render_stream(const std::vector<Interpretation>& stream) {
    std::ostringstream os;
    for (size_t i = 0; i < stream.size(); ++i) {
        const Interpretation& interp = stream[i];
        os << "% interpretation " << interp.id << "\n";
        // Facts go out in time order so the file parses back under the
        // monotonicity rule. The leading annotation point was already written
        // by the previous window, except at the very start of the stream.
        TimePoint from = i == 0 ? interp.t_start : interp.t_start + 1;
        std::vector<std::pair<TimePoint, const Atom*>> lines;
        for (const Atom& a : interp.narrative) lines.push_back({*atom_time(a), &a});
        for (const Atom& a : interp.annotation) {
            auto t = atom_time(a);
            if (t && *t >= from) lines.push_back({*t, &a});
        }
        std::stable_sort(lines.begin(), lines.end(),
                         [](const auto& l, const auto& r) { return l.first < r.first; });
        for (const auto& [t, atom] : lines) os << to_string(*atom) << ".\n";
    }
    return os.str();
}

std::vector<std::vector<Interpretation>> partition(const std::vector<Interpretation>& stream,
                                                   int k) {
    if (k < 1) throw DataError("partition: k must be >= 1");
    std::vector<std::vector<size_t>> assigned(static_cast<size_t>(k));
    int next_pos = 0;
    int next_neg = 0;
    for (size_t i = 0; i < stream.size(); ++i) {
        if (is_positive(stream[i]))
            assigned[static_cast<size_t>(next_pos++ % k)].push_back(i);
        else
            assigned[static_cast<size_t>(next_neg++ % k)].push_back(i);
    }
    std::vector<std::vector<Interpretation>> out(static_cast<size_t>(k));
    for (size_t s = 0; s < assigned.size(); ++s) {
        std::sort(assigned[s].begin(), assigned[s].end());
        for (size_t idx : assigned[s]) out[s].push_back(stream[idx]);
    }
    return out;
}

Theory default_ground_truth() {
    return parse_theory(
        "initiatedAt(moving(X,Y),T) :- happensAt(walk(X),T), happensAt(walk(Y),T), "
        "distLessThan(X,Y,25,T), dirLessThan(X,Y,45,T).\n"
        "terminatedAt(moving(X,Y),T) :- happensAt(inactive(X),T), distMoreThan(X,Y,30,T).\n");
}

std::vector<Interpretation> generate(const GeneratorConfig& config) {
    if (config.noise_rate < 0.0 || config.noise_rate >= 0.5)
        throw DataError("noise_rate must be in [0, 0.5)");
    if (config.horizon < 1 || config.entities < 1) throw DataError("bad generator dimensions");

    Rng rng(config.seed);
    Rng noise_rng(config.seed ^ 0xD1B54A32D192ED03ull);

    std::vector<std::string> names;
    for (int i = 0; i < config.entities; ++i) names.push_back("id" + std::to_string(i + 1));

    // Narrative simulation.
    Interpretation whole;
    whole.t_start = 1;
    whole.t_end = config.horizon;
    std::vector<double> x(names.size()), y(names.size());
    std::vector<long> dir(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
        x[i] = static_cast<double>(rng.below(static_cast<std::uint64_t>(config.box) + 1));
        y[i] = static_cast<double>(rng.below(static_cast<std::uint64_t>(config.box) + 1));
        dir[i] = static_cast<long>(rng.below(360));
    }
    long span = static_cast<long>(config.step);
    for (TimePoint t = 1; t <= config.horizon; ++t) {
        for (size_t i = 0; i < names.size(); ++i) {
            double r = rng.real();
            const char* ev = r < config.p_walk                     ? "walk"
                             : r < config.p_walk + config.p_inactive ? "inactive"
                                                                     : "active";
            whole.narrative.push_back(
                Atom{"happensAt", {Term::func(ev, {Term::constant(names[i])}),
                                   Term::number(static_cast<double>(t))}});
            long dx = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * span + 1))) - span;
            long dy = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * span + 1))) - span;
            x[i] = std::clamp(x[i] + static_cast<double>(dx), 0.0, config.box);
            y[i] = std::clamp(y[i] + static_cast<double>(dy), 0.0, config.box);
            // headings persist with occasional re-orientation and jitter
            if (rng.real() < 0.2)
                dir[i] = static_cast<long>(rng.below(360));
            else
                dir[i] = (dir[i] + static_cast<long>(rng.below(41)) - 20 + 360) % 360;
            whole.narrative.push_back(
                Atom{"holdsAt", {Term::func("coords", {Term::constant(names[i]),
                                                       Term::number(std::floor(x[i])),
                                                       Term::number(std::floor(y[i]))}),
                                 Term::number(static_cast<double>(t))}});
            whole.narrative.push_back(
                Atom{"holdsAt", {Term::func("direction", {Term::constant(names[i]),
                                                          Term::number(static_cast<double>(dir[i]))}),
                                 Term::number(static_cast<double>(t))}});
        }
    }
    whole.finalize();

    // Exact annotation under the ground truth.
    std::map<TimePoint, std::set<Term>> annotation;
    FluentState state;
    for (TimePoint t = 1; t <= config.horizon; ++t) {
        std::set<Term> initiated;
        std::set<Term> terminated;
        for (const Clause& c : config.ground_truth.initiation) {
            auto fs = clause_firings(c, whole, t);
            initiated.insert(fs.begin(), fs.end());
        }
        for (const Clause& c : config.ground_truth.termination) {
            auto fs = clause_firings(c, whole, t);
            terminated.insert(fs.begin(), fs.end());
        }
        state = step_infer(state, initiated, terminated);
        annotation[t + 1] = state.holding;
    }

    // Instance universe for noise: target schemas over all entity tuples.
    std::vector<Term> universe;
    for (const Clause& c : config.ground_truth.initiation) {
        for (const Term& f : ground_instances(c.target_fluent(), whole, 1)) {
            if (std::find(universe.begin(), universe.end(), f) == universe.end())
                universe.push_back(f);
        }
    }
    // With probability noise_rate, one annotation atom flips per time point.
    if (config.noise_rate > 0.0 && !universe.empty()) {
        for (TimePoint t = 2; t <= config.horizon + 1; ++t) {
            if (noise_rng.real() >= config.noise_rate) continue;
            const Term& f = universe[noise_rng.below(universe.size())];
            auto& at = annotation[t];
            if (!at.erase(f)) at.insert(f);
        }
    }

    // Chunk into windows.
    std::vector<Interpretation> out;
    for (TimePoint start = 1; start <= config.horizon; start += config.chunk_size) {
        Interpretation interp;
        interp.id = static_cast<long>(out.size());
        interp.t_start = start;
        interp.t_end = std::min(config.horizon, start + config.chunk_size - 1);
        out.push_back(std::move(interp));
    }
    for (const Atom& a : whole.narrative) {
        TimePoint t = *atom_time(a);
        out[static_cast<size_t>((t - 1) / config.chunk_size)].narrative.push_back(a);
    }
    for (auto& [t, fluents] : annotation) {
        for (const Term& f : fluents) {
            Atom fact{"holdsAt", {f, Term::number(static_cast<double>(t))}};
            long label = (t - 2) / config.chunk_size;
            long seed = (t - 1) / config.chunk_size;
            if (t > 1 && label < static_cast<long>(out.size())) out[label].annotation.push_back(fact);
            if (t <= config.horizon && seed != label && seed < static_cast<long>(out.size()))
                out[seed].annotation.push_back(fact);
        }
    }
    for (Interpretation& interp : out) interp.finalize();
    return out;
}

GeneratorConfig load_generator_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open generator config: " + path);
    GeneratorConfig cfg;
    cfg.ground_truth = default_ground_truth();
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r\n") != std::string::npos)
                throw DataError("generator config line " + std::to_string(lineno) +
                                ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r\n"));
            s.erase(s.find_last_not_of(" \t\r\n") + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "entities")
                cfg.entities = std::stoi(value);
            else if (key == "horizon")
                cfg.horizon = std::stol(value);
            else if (key == "noise")
                cfg.noise_rate = std::stod(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "chunk")
                cfg.chunk_size = std::stol(value);
            else if (key == "theory")
                cfg.ground_truth = load_theory(value);
            else
                throw DataError("unknown key " + key);
        } catch (const DataError&) {
            throw;
        } catch (const std::exception&) {
            throw DataError("generator config line " + std::to_string(lineno) + ": bad value for " +
                            key);
        }
    }
    return cfg;
}

}  // namespace eclearn
