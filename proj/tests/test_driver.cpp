#include <doctest.h>

#include "eclearn/driver.hpp"
#include "eclearn/parse.hpp"
#include "eclearn/socket_transport.hpp"
#include "fixtures.hpp"

using namespace eclearn;

namespace {

std::vector<Interpretation> small_stream(long horizon, std::uint64_t seed, double noise = 0.0) {
    GeneratorConfig cfg;
    cfg.ground_truth = default_ground_truth();
    cfg.entities = 3;
    cfg.horizon = horizon;
    cfg.seed = seed;
    cfg.noise_rate = noise;
    return generate(cfg);
}

}  // namespace

TEST_CASE("single-node learning emits a theory without any messages") {
    auto stream = small_stream(800, 5);
    LearnOptions opt;
    opt.params.tie_threshold = 0.1;
    RunReport report = learn(stream, testing::activity_modes(), opt);
    CHECK(report.messages_sent == 0);
    CHECK(report.message_bytes == 0);
    CHECK_FALSE(report.final_theory.empty());
    CHECK(report.f1 > 0.9);
    CHECK(report.theory_size_literals == report.final_theory.total_literals());
}

TEST_CASE("empty stream reports an empty theory and a warning") {
    LearnOptions opt;
    RunReport report = learn({}, testing::activity_modes(), opt);
    CHECK(report.final_theory.empty());
    CHECK(report.f1 == 0.0);
    CHECK(report.no_positives);
    CHECK(report.to_kv().find("no_positive") != std::string::npos);
}

TEST_CASE("multi-node learning exchanges messages and stays consistent") {
    auto stream = small_stream(600, 5);
    LearnOptions opt;
    opt.params.tie_threshold = 0.1;
    opt.nodes = 2;
    RunReport report = learn(stream, testing::activity_modes(), opt);  // throws on divergence
    CHECK(report.messages_sent > 0);
    CHECK(report.message_bytes > 0);
    CHECK_FALSE(report.final_theory.empty());
}

TEST_CASE("same seed and config reproduce the run byte for byte") {
    auto stream = small_stream(400, 77);
    LearnOptions opt;
    opt.nodes = 2;
    opt.seed = 123;
    RunReport a = learn(stream, testing::activity_modes(), opt);
    RunReport b = learn(stream, testing::activity_modes(), opt);
    CHECK(a.final_theory.render() == b.final_theory.render());
    CHECK(a.messages_sent == b.messages_sent);
    CHECK(a.message_bytes == b.message_bytes);
    CHECK(a.f1 == b.f1);
}

TEST_CASE("evaluate") {
    auto stream = small_stream(300, 8);

    SUBCASE("empty theory on a stream with positives scores zero") {
        EvalResult ev = evaluate(Theory{}, stream);
        CHECK(ev.f1 == 0.0);
        CHECK(ev.tp == 0);
        CHECK(ev.fn > 0);
    }
    SUBCASE("the generating theory scores one") {
        EvalResult ev = evaluate(default_ground_truth(), stream);
        CHECK(ev.f1 == doctest::Approx(1.0));
    }
}

TEST_CASE("cross-validation") {
    auto stream = small_stream(300, 9);
    LearnOptions opt;

    SUBCASE("rejects bad fold counts") {
        CHECK_THROWS_AS(cross_validate(stream, testing::activity_modes(), 1, opt), ConfigError);
        CHECK_THROWS_AS(
            cross_validate(stream, testing::activity_modes(),
                           static_cast<int>(stream.size()) + 1, opt),
            ConfigError);
    }
    SUBCASE("deterministic across reruns and reports micro-averaged counts") {
        RunReport a = cross_validate(stream, testing::activity_modes(), 3, opt);
        RunReport b = cross_validate(stream, testing::activity_modes(), 3, opt);
        CHECK(a.f1 == b.f1);
        CHECK(a.tp == b.tp);
        double denom = static_cast<double>(2 * a.tp + a.fp + a.fn);
        if (denom > 0) CHECK(a.f1 == doctest::Approx(2.0 * a.tp / denom));
        CHECK(a.folds == 3);
    }
}

TEST_CASE("partitioned counting merges to the single-node counts exactly") {
    auto stream = small_stream(240, 31);
    ModeSet modes = testing::activity_modes();
    Interpretation seed = testing::activity_interpretation();
    auto bottom = std::make_shared<BottomClause>(
        construct_bottom(seed, 1, parse_term("moving(id1,id2)"), ClauseKind::Initiation, modes));
    ClauseId rid = make_clause_id("shared", 0);
    NodeOptions frozen{.generation = false, .specialization = false, .pruning = false};

    // Reference: one node over the whole stream.
    std::vector<Envelope> sink;
    LearnerNode reference("ref", ClauseKind::Initiation, modes, HoeffdingParams{}, {}, "",
                          [&sink](Envelope e) { sink.push_back(std::move(e)); }, frozen);
    reference.mutable_theory().insert(make_root_clause(rid, bottom));
    for (const Interpretation& interp : stream) reference.process_interpretation(interp);
    const Clause* ref_clause = reference.theory().find(rid);
    REQUIRE(ref_clause);

    for (int k = 2; k <= 4; ++k) {
        InProcGroup group(ClauseKind::Initiation, k, modes, HoeffdingParams{}, 1, frozen);
        for (size_t i = 0; i < group.size(); ++i)
            group.node(i).mutable_theory().insert(make_root_clause(rid, bottom));
        group.run(partition(stream, k));

        ClauseStats merged = group.node(0).theory().find(rid)->stats;
        auto refs = group.node(0).theory().find(rid)->refinement_stats;
        PeerLedger ledger;
        for (size_t i = 1; i < group.size(); ++i) {
            const Clause* c = group.node(i).theory().find(rid);
            REQUIRE(c);
            Message m;
            m.type = MsgType::StatsReply;
            m.clause_id = rid;
            m.responder = group.node(i).id();
            m.parent_stats = c->stats;
            m.refinement_stats = c->refinement_stats;
            merge_reply(merged, refs, ledger, m);
        }
        CHECK(merged == ref_clause->stats);
        CHECK(refs == ref_clause->refinement_stats);
    }
}

TEST_CASE("socket transport smoke run") {
    auto stream = small_stream(300, 13);
    ModeSet modes = testing::activity_modes();

    SUBCASE("group-level run keeps replicas consistent") {
        SocketGroupResult res =
            run_socket_group(ClauseKind::Initiation, 2, modes, HoeffdingParams{}, 3, {},
                             partition(stream, 2), "127.0.0.1", 0);
        REQUIRE(res.theories.size() == 2);
        CHECK(res.theories[0].structure() == res.theories[1].structure());
        CHECK(res.messages > 0);
        CHECK(res.bytes > 0);
    }
    SUBCASE("learn over sockets produces a usable report") {
        LearnOptions opt;
        opt.nodes = 2;
        opt.transport = "socket";
        RunReport report = learn(stream, modes, opt);
        CHECK(report.messages_sent > 0);
        CHECK_FALSE(report.final_theory.empty());
    }
}

TEST_CASE("unknown transport and bad node count are config errors") {
    auto stream = small_stream(40, 2);
    LearnOptions opt;
    opt.transport = "carrier-pigeon";
    CHECK_THROWS_AS(learn(stream, testing::activity_modes(), opt), ConfigError);
    opt.transport = "inproc";
    opt.nodes = 0;
    CHECK_THROWS_AS(learn(stream, testing::activity_modes(), opt), ConfigError);
}
