#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "eclearn/rng.hpp"
#include "eclearn/scoring.hpp"

using namespace eclearn;

TEST_CASE("hoeffding epsilon against high-precision values") {
    // sqrt(ln(20)/2000) and sqrt(ln(20)/200), independently computed.
    CHECK(hoeffding_epsilon(0.05, 1000) == doctest::Approx(0.038702275602049).epsilon(1e-9));
    CHECK(hoeffding_epsilon(0.05, 100) == doctest::Approx(0.122387341534041).epsilon(1e-9));
    // quadrupling n halves epsilon
    CHECK(hoeffding_epsilon(0.05, 4000) ==
          doctest::Approx(hoeffding_epsilon(0.05, 1000) / 2.0).epsilon(1e-12));
    // delta -> 1 collapses the interval
    CHECK(hoeffding_epsilon(1.0, 7) == doctest::Approx(0.0));
    CHECK_THROWS_AS(hoeffding_epsilon(0.05, 0), std::invalid_argument);
    CHECK_THROWS_AS(hoeffding_epsilon(0.0, 10), std::invalid_argument);
}

TEST_CASE("epsilon is strictly decreasing in n and in delta") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        double delta = 0.001 + 0.998 * rng.real();
        long n = 1 + static_cast<long>(rng.below(100000));
        CHECK(hoeffding_epsilon(delta, n) > hoeffding_epsilon(delta, n + 1));
        double delta2 = delta + (0.999 - delta) * (0.1 + 0.9 * rng.real());
        if (delta2 > delta) CHECK(hoeffding_epsilon(delta, n) > hoeffding_epsilon(delta2, n));
    }
}

TEST_CASE("g-score") {
    CHECK(g_score({3, 1, 0, 10}, ClauseKind::Initiation) == doctest::Approx(0.75));
    CHECK(g_score({3, 0, 3, 10}, ClauseKind::Termination) == doctest::Approx(0.5));
    CHECK(g_score({}, ClauseKind::Initiation) == 0.0);
    CHECK(g_score({}, ClauseKind::Termination) == 0.0);
    // fn does not affect initiation scoring, fp does not affect termination
    CHECK(g_score({3, 1, 99, 10}, ClauseKind::Initiation) == doctest::Approx(0.75));
    CHECK(g_score({3, 99, 3, 10}, ClauseKind::Termination) == doctest::Approx(0.5));
}

TEST_CASE("hoeffding decision") {
    HoeffdingParams params;  // delta 0.05, tau 0.05

    SUBCASE("clear margin specializes") {
        // g(r1)=0.9, g(r2)=0.7, parent below both, e=1000: 0.2 > 0.0387
        ClauseStats parent{5, 5, 0, 1000};
        std::map<std::string, ClauseStats> refs{
            {"a", {9, 1, 0, 1000}},
            {"b", {7, 3, 0, 1000}},
        };
        Decision d = hoeffding_decision(parent, refs, ClauseKind::Initiation, params);
        CHECK(d.action == Decision::Action::Specialize);
        CHECK(d.candidate_key == "a");
    }

    SUBCASE("parent on top keeps regardless of margin") {
        ClauseStats parent{99, 1, 0, 100000};
        std::map<std::string, ClauseStats> refs{{"a", {1, 1, 0, 100000}}};
        Decision d = hoeffding_decision(parent, refs, ClauseKind::Initiation, params);
        CHECK(d.action == Decision::Action::Keep);
    }

    SUBCASE("thin margin with wide interval keeps") {
        // g-gap 0.01 at e=100: eps = 0.1224 >= tau, so keep
        ClauseStats parent{0, 1, 0, 100};
        std::map<std::string, ClauseStats> refs{
            {"a", {50, 50, 0, 100}},
            {"b", {49, 51, 0, 100}},
        };
        Decision d = hoeffding_decision(parent, refs, ClauseKind::Initiation, params);
        CHECK(d.action == Decision::Action::Keep);
    }

    SUBCASE("tie-break fires once the interval shrinks below tau") {
        // same scores but e large enough that eps < 0.05
        ClauseStats parent{0, 1, 0, 1000};
        std::map<std::string, ClauseStats> refs{
            {"a", {50, 50, 0, 1000}},
            {"b", {49, 51, 0, 1000}},
        };
        REQUIRE(hoeffding_epsilon(params.delta, 1000) < params.tie_threshold);
        Decision d = hoeffding_decision(parent, refs, ClauseKind::Initiation, params);
        CHECK(d.action == Decision::Action::Specialize);
        CHECK(d.candidate_key == "a");
    }

    SUBCASE("equal-score candidates resolve to the smallest key") {
        ClauseStats parent{0, 1, 0, 5000};
        std::map<std::string, ClauseStats> refs{
            {"zeta", {10, 0, 0, 5000}},
            {"alpha", {10, 0, 0, 5000}},
        };
        Decision d = hoeffding_decision(parent, refs, ClauseKind::Initiation, params);
        CHECK(d.action == Decision::Action::Specialize);
        CHECK(d.candidate_key == "alpha");
    }

    SUBCASE("no data or no candidates keeps") {
        CHECK(hoeffding_decision({}, {}, ClauseKind::Initiation, params).action ==
              Decision::Action::Keep);
        CHECK(hoeffding_decision({0, 0, 0, 0}, {{"a", {1, 0, 0, 0}}}, ClauseKind::Initiation,
                                 params)
                  .action == Decision::Action::Keep);
    }
}

TEST_CASE("winner never scores below the parent") {
    HoeffdingParams params;
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        auto random_stats = [&] {
            ClauseStats s;
            s.tp = static_cast<long>(rng.below(50));
            s.fp = static_cast<long>(rng.below(50));
            s.fn = static_cast<long>(rng.below(50));
            s.e = 1 + static_cast<long>(rng.below(5000));
            return s;
        };
        ClauseStats parent = random_stats();
        std::map<std::string, ClauseStats> refs;
        size_t n = 1 + rng.below(6);
        for (size_t j = 0; j < n; ++j) refs["k" + std::to_string(j)] = random_stats();
        ClauseKind kind = rng.below(2) ? ClauseKind::Initiation : ClauseKind::Termination;
        Decision d = hoeffding_decision(parent, refs, kind, params);
        if (d.action == Decision::Action::Specialize) {
            CHECK(g_score(refs.at(d.candidate_key), kind) > g_score(parent, kind));
        }
    }
}

TEST_CASE("pruning rule") {
    HoeffdingParams params;  // theta = 0.3

    // stability gate
    CHECK_FALSE(should_prune({0, 50, 0, 50}, ClauseKind::Initiation, 10, 200.0, params));
    // a clause mid-specialization is protected for a full tie-break horizon
    // (~599 examples at delta=0.05, tau=0.05) even when the observed average
    // span is shorter
    CHECK_FALSE(should_prune({0, 500, 0, 500}, ClauseKind::Initiation, 500, 66.0, params));
    // before any specialization the horizon alone is the stability bar
    CHECK_FALSE(should_prune({0, 400, 0, 400}, ClauseKind::Initiation, 400, 0.0, params));
    CHECK(should_prune({0, 900, 0, 900}, ClauseKind::Initiation, 900, 0.0, params));
    // low score, long stability, small interval: prune
    ClauseStats bad{10, 90, 0, 1000};  // precision 0.1
    REQUIRE(g_score(bad, ClauseKind::Initiation) + hoeffding_epsilon(params.delta, 1000) <
            params.prune_threshold);
    CHECK(should_prune(bad, ClauseKind::Initiation, 1000, 200.0, params));
    // good clause stays
    CHECK_FALSE(should_prune({90, 10, 0, 1000}, ClauseKind::Initiation, 1000, 200.0, params));
}
