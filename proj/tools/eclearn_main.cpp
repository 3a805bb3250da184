#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "eclearn/data.hpp"
#include "eclearn/driver.hpp"
#include "eclearn/modes.hpp"

using namespace eclearn;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTransport = 3;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

StreamSpec spec_from_modes(const ModeSet& modes, long chunk) {
    StreamSpec spec;
    spec.chunk_size = chunk;
    spec.targets = modes.target_schemas();
    if (spec.targets.empty()) throw ConfigError("modes declare no head schemas");
    return spec;
}

StreamSpec spec_from_theory(const Theory& theory, long chunk) {
    StreamSpec spec;
    spec.chunk_size = chunk;
    auto add = [&](const Clause& c) {
        const Term& f = c.target_fluent();
        std::pair<std::string, size_t> schema{f.name, f.args.size()};
        for (const auto& s : spec.targets) {
            if (s == schema) return;
        }
        spec.targets.push_back(schema);
    };
    for (const Clause& c : theory.initiation) add(c);
    for (const Clause& c : theory.termination) add(c);
    if (spec.targets.empty()) throw ConfigError("theory names no target fluents");
    return spec;
}

// Topology file: `mediator = host:port` plus an informational node list.
void apply_topology(const std::string& path, LearnOptions& options) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open topology file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        size_t comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t\r\n"));
            s.erase(s.find_last_not_of(" \t\r\n") + 1);
        };
        strip(key);
        strip(value);
        if (key == "mediator") {
            size_t colon = value.rfind(':');
            if (colon == std::string::npos)
                throw ConfigError("topology mediator must be host:port");
            options.socket_host = value.substr(0, colon);
            options.socket_port = std::stoi(value.substr(colon + 1));
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed online learner of Event Calculus event definitions"};
    app.require_subcommand(1);

    // ── gen ──
    auto* gen = app.add_subcommand("gen", "Generate a synthetic interpretation stream");
    std::string gen_config, gen_theory, gen_out;
    GeneratorConfig gcfg;
    gcfg.ground_truth = default_ground_truth();
    gen->add_option("--config", gen_config, "Key-value generator config file");
    gen->add_option("--entities", gcfg.entities, "Number of tracked entities");
    gen->add_option("--horizon", gcfg.horizon, "Total time points");
    gen->add_option("--noise", gcfg.noise_rate, "Annotation flip probability");
    gen->add_option("--seed", gcfg.seed, "Generator seed");
    gen->add_option("--chunk-size", gcfg.chunk_size, "Time points per interpretation");
    gen->add_option("--theory", gen_theory, "Ground-truth theory file");
    gen->add_option("--out", gen_out, "Output fact file")->required();

    // ── shared learn/cv options ──
    std::string data_path, modes_path, out_path, theory_out, topology;
    LearnOptions options;
    long chunk = 1;
    auto add_learn_flags = [&](CLI::App* cmd) {
        cmd->add_option("--data", data_path, "Training fact file")->required();
        cmd->add_option("--modes", modes_path, "Mode declaration file")->required();
        cmd->add_option("--nodes", options.nodes, "Processing node count");
        cmd->add_option("--transport", options.transport, "inproc | socket");
        cmd->add_option("--delta", options.params.delta, "Hoeffding delta");
        cmd->add_option("--tie-threshold", options.params.tie_threshold, "Tie threshold tau");
        cmd->add_option("--prune-threshold", options.params.prune_threshold,
                        "Prune threshold theta");
        cmd->add_option("--warm-up", options.params.warm_up, "Min examples for emission");
        cmd->add_option("--chunk-size", chunk, "Time points per interpretation");
        cmd->add_option("--seed", options.seed, "Run seed");
        cmd->add_option("--socket-host", options.socket_host, "Socket transport host");
        cmd->add_option("--socket-port", options.socket_port, "Socket transport port (0=auto)");
        cmd->add_option("--topology", topology, "Topology file (mediator = host:port)");
        cmd->add_option("--out", out_path, "Write the key-value report here");
    };

    auto* learn_cmd = app.add_subcommand("learn", "Learn a theory from a stream");
    add_learn_flags(learn_cmd);
    learn_cmd->add_option("--save-theory", theory_out, "Write the learned theory here");

    auto* cv_cmd = app.add_subcommand("cv", "Cross-validated learning");
    int folds = 10;
    add_learn_flags(cv_cmd);
    cv_cmd->add_option("--folds", folds, "Fold count");

    // ── eval ──
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a theory on a stream");
    std::string eval_theory, eval_data, eval_out;
    long eval_chunk = 1;
    eval_cmd->add_option("--theory", eval_theory, "Theory file")->required();
    eval_cmd->add_option("--data", eval_data, "Test fact file")->required();
    eval_cmd->add_option("--chunk-size", eval_chunk, "Time points per interpretation");
    eval_cmd->add_option("--out", eval_out, "Write tp/fp/fn/f1 here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) {
            if (!gen_config.empty()) {
                GeneratorConfig from_file = load_generator_config(gen_config);
                // explicit flags override the file
                if (gen->count("--entities") == 0) gcfg.entities = from_file.entities;
                if (gen->count("--horizon") == 0) gcfg.horizon = from_file.horizon;
                if (gen->count("--noise") == 0) gcfg.noise_rate = from_file.noise_rate;
                if (gen->count("--seed") == 0) gcfg.seed = from_file.seed;
                if (gen->count("--chunk-size") == 0) gcfg.chunk_size = from_file.chunk_size;
                if (gen->count("--theory") == 0) gcfg.ground_truth = from_file.ground_truth;
            }
            if (!gen_theory.empty()) gcfg.ground_truth = load_theory(gen_theory);
            auto stream = generate(gcfg);
            write_file(gen_out, render_stream(stream));
            std::cout << "wrote " << stream.size() << " interpretations to " << gen_out << "\n";
            return 0;
        }

        if (learn_cmd->parsed() || cv_cmd->parsed()) {
            if (!topology.empty()) apply_topology(topology, options);
            ModeSet modes = load_modes(modes_path);
            auto stream = load_stream(data_path, spec_from_modes(modes, chunk));
            RunReport report = learn_cmd->parsed()
                                   ? learn(stream, modes, options)
                                   : cross_validate(stream, modes, folds, options);
            std::cout << report.human();
            if (!out_path.empty()) write_file(out_path, report.to_kv());
            if (!theory_out.empty()) write_file(theory_out, report.final_theory.render());
            return 0;
        }

        if (eval_cmd->parsed()) {
            Theory theory = load_theory(eval_theory);
            auto stream = load_stream(eval_data, spec_from_theory(theory, eval_chunk));
            EvalResult ev = evaluate(theory, stream);
            std::ostringstream os;
            os << "tp=" << ev.tp << "\nfp=" << ev.fp << "\nfn=" << ev.fn << "\nf1=" << ev.f1
               << "\n";
            std::cout << os.str();
            if (!eval_out.empty()) write_file(eval_out, os.str());
            return 0;
        }
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
