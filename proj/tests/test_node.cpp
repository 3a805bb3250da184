#include <doctest.h>

#include "eclearn/data.hpp"
#include "eclearn/node.hpp"
#include "eclearn/parse.hpp"
#include "fixtures.hpp"

using namespace eclearn;

namespace {

struct Capture {
    std::vector<Envelope> sent;
    Sender sender() {
        return [this](Envelope env) { sent.push_back(std::move(env)); };
    }
};

// One window [t, t]: events at time t, annotation atoms with explicit times.
Interpretation window(TimePoint t, const std::vector<std::string>& events,
                      const std::vector<std::string>& annotation) {
    Interpretation interp;
    interp.t_start = t;
    interp.t_end = t;
    for (const std::string& e : events)
        interp.narrative.push_back(parse_atom("happensAt(" + e + "," + std::to_string(t) + ")"));
    for (const std::string& a : annotation) interp.annotation.push_back(parse_atom(a));
    interp.finalize();
    return interp;
}

LearnerNode standalone(ClauseKind kind, const ModeSet& modes, Capture& cap,
                       NodeOptions opt = {}) {
    return LearnerNode("n0", kind, modes, HoeffdingParams{}, {}, "", cap.sender(), opt);
}

Clause injected(const std::string& text, long id_counter = 0) {
    Clause c = parse_clause(text);
    c.id = make_clause_id("inject", id_counter);
    return c;
}

}  // namespace

TEST_CASE("classify_instances on a fixed theory") {
    Theory theory;
    FluentState state;

    SUBCASE("empty theory, annotated fluent is an FN") {
        auto labels =
            classify_instances(theory, window(1, {"walk(id1)"}, {"holdsAt(moving(id1,id2),2)"}),
                               state);
        CHECK(label_of(labels.at(2), parse_term("moving(id1,id2)")) == InstanceLabel::FN);
    }
    SUBCASE("empty theory, empty annotation is all TN") {
        auto labels = classify_instances(theory, window(1, {"walk(id1)"}, {}), state);
        CHECK(label_of(labels.at(2), parse_term("moving(id1,id2)")) == InstanceLabel::TN);
    }
    SUBCASE("held state persists through inertia and labels TP") {
        state.holding.insert(parse_term("moving(id1,id2)"));
        auto labels =
            classify_instances(theory, window(1, {"walk(id1)"}, {"holdsAt(moving(id1,id2),2)"}),
                               state);
        CHECK(label_of(labels.at(2), parse_term("moving(id1,id2)")) == InstanceLabel::TP);
        CHECK(state.holds(parse_term("moving(id1,id2)")));
    }
}

TEST_CASE("initiation counters follow the reward/penalize matrix") {
    ModeSet modes = testing::activity_modes();
    Capture cap;
    LearnerNode node = standalone(ClauseKind::Initiation, modes, cap, {.generation = false});
    node.mutable_theory().insert(injected(
        "initiatedAt(moving(X,Y),T) :- happensAt(walk(X),T), happensAt(walk(Y),T)."));

    // fires on (id1,id2) and (id2,id1); only the first is annotated at t+1
    node.process_interpretation(
        window(1, {"walk(id1)", "walk(id2)"}, {"holdsAt(moving(id1,id2),2)"}));

    const Clause& c = node.theory().initiation.at(0);
    CHECK(c.stats.tp == 1);
    CHECK(c.stats.fp == 1);
    CHECK(c.stats.fn == 0);
    CHECK(c.stats.e == 1);
    CHECK(cap.sent.empty());  // standalone node, quiescent step
}

TEST_CASE("termination counters follow the reward/penalize matrix") {
    ModeSet modes = testing::activity_modes();
    Capture cap;
    LearnerNode node = standalone(ClauseKind::Termination, modes, cap, {.generation = false});
    node.mutable_theory().insert(
        injected("terminatedAt(moving(X,Y),T) :- happensAt(inactive(X),T)."));

    SUBCASE("correct termination of a held fluent is a TP") {
        node.process_interpretation(window(1, {"inactive(id1)", "walk(id2)"},
                                           {"holdsAt(moving(id1,id2),1)"}));
        const Clause& c = node.theory().termination.at(0);
        CHECK(c.stats.tp == 1);
        CHECK(c.stats.fn == 0);
    }
    SUBCASE("terminating a still-annotated fluent is penalized with FN") {
        node.process_interpretation(
            window(1, {"inactive(id1)", "walk(id2)"},
                   {"holdsAt(moving(id1,id2),1)", "holdsAt(moving(id1,id2),2)"}));
        const Clause& c = node.theory().termination.at(0);
        CHECK(c.stats.tp == 0);
        CHECK(c.stats.fn == 1);
    }
    SUBCASE("firing on a fluent that is not held counts nothing") {
        node.process_interpretation(window(1, {"inactive(id1)", "walk(id2)"}, {}));
        const Clause& c = node.theory().termination.at(0);
        CHECK(c.stats.tp == 0);
        CHECK(c.stats.fn == 0);
        CHECK(c.stats.e == 1);
    }
}

TEST_CASE("clause generation triggers") {
    ModeSet modes = testing::activity_modes();
    Capture cap;

    SUBCASE("first uncovered positive seeds an empty-bodied initiation clause") {
        LearnerNode node = standalone(ClauseKind::Initiation, modes, cap);
        node.process_interpretation(
            window(1, {"walk(id1)", "walk(id2)"}, {"holdsAt(moving(id1,id2),2)"}));
        REQUIRE(node.theory().initiation.size() == 1);
        const Clause& c = node.theory().initiation.at(0);
        CHECK(c.body.empty());
        CHECK(to_string(c.head) == "initiatedAt(moving(X0,X1),T)");
        REQUIRE(c.bottom);
        CHECK_FALSE(c.bottom->literals.empty());
        CHECK(node.metrics().clauses_generated == 1);
        // the new clause was generated from this window, not yet evaluated
        CHECK(c.stats.e == 0);
    }

    SUBCASE("covered positives generate nothing") {
        LearnerNode node = standalone(ClauseKind::Initiation, modes, cap);
        node.mutable_theory().insert(injected("initiatedAt(moving(X,Y),T)."));  // fires always
        node.process_interpretation(
            window(1, {"walk(id1)", "walk(id2)"}, {"holdsAt(moving(id1,id2),2)"}));
        CHECK(node.theory().initiation.size() == 1);
        CHECK(node.metrics().clauses_generated == 0);
    }

    SUBCASE("unexplained persistence seeds a termination clause") {
        LearnerNode node = standalone(ClauseKind::Termination, modes, cap);
        node.process_interpretation(window(1, {"inactive(id1)", "inactive(id2)"},
                                           {"holdsAt(moving(id1,id2),1)"}));
        REQUIRE(node.theory().termination.size() == 1);
        const Clause& c = node.theory().termination.at(0);
        CHECK(c.body.empty());
        CHECK(to_string(c.head) == "terminatedAt(moving(X0,X1),T)");
        CHECK(node.metrics().clauses_generated == 1);
    }

    SUBCASE("at most one new clause per interpretation") {
        LearnerNode node = standalone(ClauseKind::Initiation, modes, cap);
        node.process_interpretation(window(1, {"walk(id1)", "walk(id2)", "walk(id3)"},
                                           {"holdsAt(moving(id1,id2),2)",
                                            "holdsAt(moving(id2,id3),2)"}));
        CHECK(node.metrics().clauses_generated == 1);
    }
}

TEST_CASE("e increments once per interpretation for clauses and candidates") {
    ModeSet modes = testing::activity_modes();
    Capture cap;
    LearnerNode node = standalone(ClauseKind::Initiation, modes, cap, {.generation = false});
    Interpretation seed = testing::activity_interpretation();
    auto bottom = std::make_shared<BottomClause>(
        construct_bottom(seed, 1, parse_term("moving(id1,id2)"), ClauseKind::Initiation, modes));
    node.mutable_theory().insert(make_root_clause(make_clause_id("n0", 0), bottom));

    for (int i = 1; i <= 3; ++i)
        node.process_interpretation(window(i, {"walk(id1)", "walk(id2)"}, {}));

    const Clause& c = node.theory().initiation.at(0);
    CHECK(c.stats.e == 3);
    for (const auto& [key, st] : c.refinement_stats) CHECK(st.e == 3);
}

TEST_CASE("distributed round lifecycle at the requester") {
    ModeSet modes = testing::activity_modes();
    Capture cap;
    LearnerNode node("init/n0", ClauseKind::Initiation, modes, HoeffdingParams{},
                     {"init/n1", "init/n2"}, "init/med", cap.sender(), {.generation = false});

    Interpretation seed = testing::activity_interpretation();
    auto bottom = std::make_shared<BottomClause>(
        construct_bottom(seed, 1, parse_term("moving(id1,id2)"), ClauseKind::Initiation, modes));
    Clause c = make_root_clause(make_clause_id("init/n0", 0), bottom);
    // parent mediocre, one candidate clearly ahead, plenty of examples
    c.stats = {50, 50, 0, 1000};
    for (auto& [key, st] : c.refinement_stats) st = {10, 40, 0, 1000};
    c.refinement_stats.begin()->second = {95, 5, 0, 1000};
    std::string best_key = c.refinement_stats.begin()->first;
    ClauseId rid = c.id;
    node.mutable_theory().insert(std::move(c));

    node.process_interpretation(window(1, {"walk(id1)", "walk(id2)"}, {}));

    REQUIRE(cap.sent.size() == 1);
    CHECK(cap.sent[0].msg.type == MsgType::SpecializeRequest);
    CHECK(cap.sent[0].to == "init/med");
    CHECK(cap.sent[0].msg.clause_id == rid);
    CHECK(node.phase() == Phase::AwaitingStats);
    CHECK(node.blocked());
    CHECK_THROWS_AS(node.process_interpretation(window(2, {"walk(id1)"}, {})), std::logic_error);

    // Peer replies (zero counts) arrive; the retest still succeeds, so the
    // node replaces the clause, notifies peers, and reports to the mediator.
    cap.sent.clear();
    for (const char* peer : {"init/n1", "init/n2"}) {
        Envelope reply;
        reply.sender = peer;
        reply.to = "init/n0";
        reply.msg.type = MsgType::StatsReply;
        reply.msg.clause_id = rid;
        reply.msg.responder = peer;
        node.handle(reply);
    }
    CHECK(node.phase() == Phase::Running);
    REQUIRE(cap.sent.size() == 3);
    CHECK(cap.sent[0].msg.type == MsgType::Replace);
    CHECK(cap.sent[1].msg.type == MsgType::Replace);
    CHECK(cap.sent[2].msg.type == MsgType::MediatorDone);
    CHECK(cap.sent[2].msg.purpose == "replaced");
    const Clause& replaced = node.theory().initiation.at(0);
    CHECK(replaced.id == rid);
    CHECK(replaced.body.size() == 1);
    CHECK(to_string(replaced.body[0]) == best_key);
    CHECK(replaced.stats.e == 0);  // fresh counters for the new version
    CHECK(node.avg_specialization_n() == doctest::Approx(1001));
}

TEST_CASE("verdicts applied at a peer") {
    ModeSet modes = testing::activity_modes();
    Capture cap;
    LearnerNode node("init/n1", ClauseKind::Initiation, modes, HoeffdingParams{}, {"init/n0"},
                     "init/med", cap.sender(), {.generation = false});

    Interpretation seed = testing::activity_interpretation();
    auto bottom = std::make_shared<BottomClause>(
        construct_bottom(seed, 1, parse_term("moving(id1,id2)"), ClauseKind::Initiation, modes));
    Clause c = make_root_clause(make_clause_id("init/n0", 0), bottom);
    ClauseId rid = c.id;
    node.mutable_theory().insert(c);

    auto verdict = [&](MsgType type, std::optional<Clause> payload) {
        Envelope env;
        env.sender = "init/n0";
        env.to = "init/n1";
        env.msg.type = type;
        env.msg.clause_id = rid;
        env.msg.clause = std::move(payload);
        return env;
    };

    SUBCASE("Replace swaps the body in place") {
        Clause next = specialize_with(c, c.candidates().at(0).key);
        node.handle(verdict(MsgType::Replace, next));
        CHECK(node.theory().initiation.size() == 1);
        CHECK(node.theory().initiation.at(0).body.size() == 1);
        CHECK(node.theory().initiation.at(0).id == rid);
    }
    SUBCASE("Proceed changes nothing") {
        auto before = node.theory().structure();
        node.handle(verdict(MsgType::Proceed, std::nullopt));
        CHECK(node.theory().structure() == before);
    }
    SUBCASE("Remove deletes and tombstones the clause") {
        node.handle(verdict(MsgType::Remove, std::nullopt));
        CHECK(node.theory().empty());
        // a late AddNewClause for the removed id stays dead
        Envelope add;
        add.sender = "init/n0";
        add.to = "init/n1";
        add.msg.type = MsgType::AddNewClause;
        add.msg.clause_id = rid;
        add.msg.clause = c;
        node.handle(add);
        CHECK(node.theory().empty());
    }
    SUBCASE("a node answers stats requests while awaiting its own replies") {
        // force the node into a round, then relay another node's request
        node.force_request(rid, "specialize");
        cap.sent.clear();
        Envelope req;
        req.sender = "init/med";
        req.to = "init/n1";
        req.msg.type = MsgType::SpecializeRequest;
        req.msg.clause_id = rid;
        req.msg.requester = "init/n0";
        node.handle(req);
        REQUIRE(cap.sent.size() == 1);
        CHECK(cap.sent[0].msg.type == MsgType::StatsReply);
        CHECK(cap.sent[0].to == "init/n0");
        CHECK(node.phase() == Phase::AwaitingStats);  // own round still open
    }
}

TEST_CASE("new clauses are broadcast before any specialize checks") {
    ModeSet modes = testing::activity_modes();
    Capture cap;
    LearnerNode node("init/n0", ClauseKind::Initiation, modes, HoeffdingParams{}, {"init/n1"},
                     "init/med", cap.sender());
    node.process_interpretation(
        window(1, {"walk(id1)", "walk(id2)"}, {"holdsAt(moving(id1,id2),2)"}));
    REQUIRE(!cap.sent.empty());
    CHECK(cap.sent[0].msg.type == MsgType::AddNewClause);
    CHECK(cap.sent[0].to == "init/n1");
    REQUIRE(cap.sent[0].msg.clause.has_value());
    CHECK(cap.sent[0].msg.clause->bottom != nullptr);
}

TEST_CASE("counter soundness: streamed counts equal a from-scratch recount") {
    GeneratorConfig cfg;
    cfg.ground_truth = default_ground_truth();
    cfg.entities = 3;
    cfg.horizon = 200;
    cfg.seed = 1234;
    auto stream = generate(cfg);
    ModeSet modes = testing::activity_modes();

    for (ClauseKind kind : {ClauseKind::Initiation, ClauseKind::Termination}) {
        Capture cap;
        NodeOptions opt{.generation = false, .specialization = false, .pruning = false};
        LearnerNode node = standalone(kind, modes, cap, opt);
        node.mutable_theory().insert(injected(
            "initiatedAt(moving(X,Y),T) :- happensAt(walk(X),T), happensAt(walk(Y),T).", 1));
        node.mutable_theory().insert(injected(
            "terminatedAt(moving(X,Y),T) :- happensAt(inactive(X),T).", 2));

        for (const Interpretation& interp : stream) node.process_interpretation(interp);

        // Independent recount over the stored stream.
        const auto& mine =
            kind == ClauseKind::Initiation ? node.theory().initiation : node.theory().termination;
        for (const Clause& c : mine) {
            ClauseStats expected;
            for (const Interpretation& interp : stream) {
                FluentState state{interp.annotation_at(interp.t_start)};
                for (TimePoint t = interp.t_start; t <= interp.t_end; ++t) {
                    auto fires = clause_firings(c, interp, t);
                    auto ann_next = interp.annotation_at(t + 1);
                    for (const Term& f : fires) {
                        if (kind == ClauseKind::Initiation) {
                            ann_next.count(f) ? ++expected.tp : ++expected.fp;
                        } else {
                            if (ann_next.count(f))
                                ++expected.fn;
                            else if (state.holds(f))
                                ++expected.tp;
                        }
                    }
                    state = kind == ClauseKind::Initiation ? step_infer(state, fires, {})
                                                           : step_infer(state, {}, fires);
                }
                ++expected.e;
            }
            CHECK(c.stats.tp == expected.tp);
            CHECK(c.stats.fp == expected.fp);
            CHECK(c.stats.fn == expected.fn);
            CHECK(c.stats.e == expected.e);
        }
    }
}
