#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eclearn/data.hpp"
#include "eclearn/driver.hpp"
#include "eclearn/modes.hpp"
#include "eclearn/scoring.hpp"

namespace py = pybind11;
using namespace eclearn;

namespace {

LearnOptions options_from_kwargs(int nodes, const std::string& transport, double delta,
                                 double tie_threshold, double prune_threshold, long warm_up,
                                 std::uint64_t seed) {
    LearnOptions o;
    o.nodes = nodes;
    o.transport = transport;
    o.params.delta = delta;
    o.params.tie_threshold = tie_threshold;
    o.params.prune_threshold = prune_threshold;
    o.params.warm_up = warm_up;
    o.seed = seed;
    return o;
}

py::dict report_to_dict(const RunReport& r) {
    py::dict d;
    d["training_seconds"] = r.training_seconds;
    d["f1"] = r.f1;
    d["tp"] = r.tp;
    d["fp"] = r.fp;
    d["fn"] = r.fn;
    d["theory_size_literals"] = r.theory_size_literals;
    d["messages_sent"] = r.messages_sent;
    d["message_bytes"] = r.message_bytes;
    d["clauses_generated"] = r.clauses_generated;
    d["clauses_pruned"] = r.clauses_pruned;
    d["nodes"] = r.nodes;
    d["no_positives"] = r.no_positives;
    d["theory"] = r.final_theory.render();
    return d;
}

std::vector<Interpretation> stream_from_text(const std::string& data, const ModeSet& modes,
                                             long chunk) {
    StreamSpec spec;
    spec.chunk_size = chunk;
    spec.targets = modes.target_schemas();
    return parse_stream(data, spec);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Distributed online learner of Event Calculus event definitions";

    m.def("hoeffding_epsilon", &hoeffding_epsilon, py::arg("delta"), py::arg("n"),
          "sqrt(ln(1/delta) / (2 n))");

    m.def(
        "generate",
        [](int entities, long horizon, double noise, std::uint64_t seed, long chunk,
           const std::string& theory) {
            GeneratorConfig cfg;
            cfg.ground_truth = theory.empty() ? default_ground_truth() : parse_theory(theory);
            cfg.entities = entities;
            cfg.horizon = horizon;
            cfg.noise_rate = noise;
            cfg.seed = seed;
            cfg.chunk_size = chunk;
            return render_stream(generate(cfg));
        },
        py::arg("entities") = 3, py::arg("horizon") = 1000, py::arg("noise") = 0.0,
        py::arg("seed") = 1, py::arg("chunk") = 1, py::arg("theory") = "",
        "Synthesize a fact-file stream from a ground-truth theory");

    m.def(
        "learn",
        [](const std::string& data, const std::string& modes_text, int nodes,
           const std::string& transport, double delta, double tie_threshold,
           double prune_threshold, long warm_up, std::uint64_t seed, long chunk) {
            ModeSet modes = parse_modes(modes_text);
            auto stream = stream_from_text(data, modes, chunk);
            RunReport r = learn(stream, modes,
                                options_from_kwargs(nodes, transport, delta, tie_threshold,
                                                    prune_threshold, warm_up, seed));
            return report_to_dict(r);
        },
        py::arg("data"), py::arg("modes"), py::arg("nodes") = 1, py::arg("transport") = "inproc",
        py::arg("delta") = 0.05, py::arg("tie_threshold") = 0.05,
        py::arg("prune_threshold") = 0.3, py::arg("warm_up") = 20, py::arg("seed") = 0,
        py::arg("chunk") = 1, "Run both learner groups over the stream and report metrics");

    m.def(
        "evaluate",
        [](const std::string& theory_text, const std::string& data, long chunk) {
            Theory theory = parse_theory(theory_text);
            StreamSpec spec;
            spec.chunk_size = chunk;
            for (const Clause& c : theory.initiation) {
                spec.targets.push_back({c.target_fluent().name, c.target_fluent().args.size()});
            }
            for (const Clause& c : theory.termination) {
                spec.targets.push_back({c.target_fluent().name, c.target_fluent().args.size()});
            }
            EvalResult ev = evaluate(theory, parse_stream(data, spec));
            py::dict d;
            d["tp"] = ev.tp;
            d["fp"] = ev.fp;
            d["fn"] = ev.fn;
            d["f1"] = ev.f1;
            return d;
        },
        py::arg("theory"), py::arg("data"), py::arg("chunk") = 1,
        "Micro-averaged recognition scores of a theory on a stream");

    m.def(
        "cross_validate",
        [](const std::string& data, const std::string& modes_text, int folds, int nodes,
           const std::string& transport, double delta, double tie_threshold,
           double prune_threshold, long warm_up, std::uint64_t seed, long chunk) {
            ModeSet modes = parse_modes(modes_text);
            auto stream = stream_from_text(data, modes, chunk);
            RunReport r = cross_validate(stream, modes, folds,
                                         options_from_kwargs(nodes, transport, delta,
                                                             tie_threshold, prune_threshold,
                                                             warm_up, seed));
            return report_to_dict(r);
        },
        py::arg("data"), py::arg("modes"), py::arg("folds") = 10, py::arg("nodes") = 1,
        py::arg("transport") = "inproc", py::arg("delta") = 0.05, py::arg("tie_threshold") = 0.05,
        py::arg("prune_threshold") = 0.3, py::arg("warm_up") = 20, py::arg("seed") = 0,
        py::arg("chunk") = 1, "Contiguous-fold cross-validation with micro-averaged F1");

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");
}
