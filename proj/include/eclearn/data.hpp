#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "eclearn/ec.hpp"
#include "eclearn/theory.hpp"

namespace eclearn {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StreamSpec {
    long chunk_size = 1;  // time points per interpretation
    std::vector<std::pair<std::string, size_t>> targets;  // complex-event functor/arity

    bool is_target(const Term& fluent) const;
};

// Fact file: one ground Prolog-style fact per line terminated by '.', '%'
// starts a comment, `% interpretation <id>` lines mark window boundaries in
// rendered output (informational; windows are rebuilt from time stamps).
// Facts must be in non-decreasing time order. holdsAt facts over a target
// fluent are annotation, everything else is narrative. Each resulting window
// [a,b] carries annotation for [a, b+1]: the leading point seeds the held
// state, the trailing one labels the final inference step.
std::vector<Interpretation> parse_stream(const std::string& text, const StreamSpec& spec);
std::vector<Interpretation> load_stream(const std::string& path, const StreamSpec& spec);
std::string render_stream(const std::vector<Interpretation>& stream);

// Stratified round-robin: interpretations with positive annotation are dealt
// out evenly, then the negatives; every sub-stream keeps temporal order.
std::vector<std::vector<Interpretation>> partition(const std::vector<Interpretation>& stream,
                                                   int k);

bool is_positive(const Interpretation& interp);

struct GeneratorConfig {
    Theory ground_truth;
    int entities = 3;
    long horizon = 1000;
    double noise_rate = 0.0;  // chance that one annotation atom flips per time point
    std::uint64_t seed = 1;
    long chunk_size = 1;
    // narrative model
    double p_walk = 0.5;
    double p_inactive = 0.3;  // remainder of the event mass is "active"
    double box = 60.0;        // coordinates random-walk within [0, box]^2
    double step = 12.0;       // max per-axis move per time point
};

// Deterministic synthetic stream: per-entity events/coordinates/directions,
// annotation computed by exact inference under the ground-truth theory, then
// each annotation instance flipped with probability noise_rate. Noise draws
// come from a separate generator, so runs differing only in noise_rate share
// the same narrative.
std::vector<Interpretation> generate(const GeneratorConfig& config);

// Two-clause theory in the shape the generator's narrative model exercises.
Theory default_ground_truth();

// Key-value generator config file: entities=3, horizon=1000, noise=0.1,
// seed=7, chunk=1, theory=<path> (optional; defaults to the built-in).
GeneratorConfig load_generator_config(const std::string& path);

}  // namespace eclearn
