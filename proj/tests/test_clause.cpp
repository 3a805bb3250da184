#include <doctest.h>

#include <algorithm>

#include "eclearn/clause.hpp"
#include "eclearn/infer.hpp"
#include "eclearn/parse.hpp"
#include "fixtures.hpp"

using namespace eclearn;

namespace {

std::vector<std::string> rendered_literals(const BottomClause& b) {
    std::vector<std::string> out;
    for (const BottomLiteral& bl : b.literals) out.push_back(to_string(bl.lit));
    return out;
}

bool has_literal(const BottomClause& b, const std::string& text) {
    auto lits = rendered_literals(b);
    return std::find(lits.begin(), lits.end(), text) != lits.end();
}

}  // namespace

TEST_CASE("mode file parsing") {
    ModeSet modes = testing::activity_modes();
    CHECK(modes.heads.size() == 2);
    CHECK(modes.bodies.size() == 6);
    CHECK(modes.pools.at("dist").size() == 3);
    auto targets = modes.target_schemas();
    REQUIRE(targets.size() == 1);
    CHECK(targets[0] == std::pair<std::string, size_t>{"moving", 2});
    CHECK(modes.is_target(parse_term("moving(id1,id2)")));
    CHECK_FALSE(modes.is_target(parse_term("coords(id1,2,3)")));

    CHECK_THROWS_AS(parse_modes("modeh(foo(+person,+time)).\n"), ConfigError);
    CHECK_THROWS_AS(parse_modes("modeb(distLessThan(+person,+person,#dist,+time)).\n"),
                    ConfigError);  // missing pool
    CHECK_THROWS_AS(parse_modes("nonsense(1).\n"), ConfigError);

    ModeSet with_recall = parse_modes(
        "modeh(initiatedAt(moving(+person,+person),+time)).\n"
        "modeb(2, happensAt(walk(+person),+time)).\n");
    CHECK(with_recall.bodies.at(0).recall == 2);
}

TEST_CASE("bottom clause construction from the activity seed") {
    Interpretation seed = testing::activity_interpretation();
    ModeSet modes = testing::activity_modes();
    Term target = parse_term("moving(id1,id2)");

    BottomClause b = construct_bottom(seed, 1, target, ClauseKind::Initiation, modes);
    CHECK(to_string(b.head) == "initiatedAt(moving(X0,X1),T)");

    SUBCASE("contains the walking and comparison literals true at the seed") {
        CHECK(has_literal(b, "happensAt(walk(X0),T)"));
        CHECK(has_literal(b, "happensAt(walk(X1),T)"));
        // distance 32.2: over 25, under 40, over 30
        CHECK_FALSE(has_literal(b, "distLessThan(X0,X1,25,T)"));
        CHECK(has_literal(b, "distLessThan(X0,X1,40,T)"));
        CHECK(has_literal(b, "distMoreThan(X0,X1,25,T)"));
        CHECK(has_literal(b, "distMoreThan(X0,X1,30,T)"));
        // directions equal at time 1
        CHECK(has_literal(b, "dirLessThan(X0,X1,45,T)"));
        CHECK(has_literal(b, "dirLessThan(X0,X1,90,T)"));
        // nobody is inactive at the seed
        CHECK_FALSE(has_literal(b, "happensAt(inactive(X0),T)"));
    }

    SUBCASE("deterministic: same seed, same modes, identical bottom") {
        BottomClause b2 = construct_bottom(seed, 1, target, ClauseKind::Initiation, modes);
        CHECK(b == b2);
    }

    SUBCASE("empty narrative saturates to an empty body") {
        Interpretation empty;
        empty.t_start = 1;
        empty.t_end = 1;
        empty.finalize();
        BottomClause eb = construct_bottom(empty, 1, target, ClauseKind::Initiation, modes);
        CHECK(eb.literals.empty());
    }

    SUBCASE("recall bounds the instantiations of a schema") {
        ModeSet capped = parse_modes(
            "modeh(initiatedAt(moving(+person,+person),+time)).\n"
            "modeb(1, happensAt(walk(+person),+time)).\n");
        BottomClause cb = construct_bottom(seed, 1, target, ClauseKind::Initiation, capped);
        CHECK(cb.literals.size() == 1);
    }

    SUBCASE("no matching head mode is an error") {
        CHECK_THROWS_AS(
            construct_bottom(seed, 1, parse_term("meeting(id1,id2)"), ClauseKind::Initiation,
                             modes),
            ConfigError);
    }
}

TEST_CASE("specialization candidates") {
    Interpretation seed = testing::activity_interpretation();
    ModeSet modes = testing::activity_modes();
    auto bottom = std::make_shared<BottomClause>(
        construct_bottom(seed, 1, parse_term("moving(id1,id2)"), ClauseKind::Initiation, modes));
    Clause root = make_root_clause(make_clause_id("n0", 0), bottom);

    SUBCASE("one candidate per connectable literal, none in the body yet") {
        auto cands = root.candidates();
        CHECK(cands.size() == bottom->literals.size());
        CHECK(root.refinement_stats.size() == cands.size());
    }

    SUBCASE("specializing consumes the literal and keeps the id") {
        auto cands = root.candidates();
        Clause child = specialize_with(root, cands[0].key);
        CHECK(child.id == root.id);
        CHECK(child.body.size() == 1);
        CHECK(child.candidates().size() == cands.size() - 1);
        CHECK(child.stable_since == 0);
        CHECK(child.stats.e == 0);
        CHECK_THROWS_AS(specialize_with(root, "no-such-key"), std::logic_error);
    }

    SUBCASE("exhausted bottom leaves no candidates") {
        Clause c = root;
        while (!c.candidates().empty()) c = specialize_with(c, c.candidates()[0].key);
        CHECK(c.body.size() == bottom->literals.size());
    }

    SUBCASE("independently constructed replicas produce identical keys") {
        auto bottom2 = std::make_shared<BottomClause>(construct_bottom(
            seed, 1, parse_term("moving(id1,id2)"), ClauseKind::Initiation, modes));
        Clause replica = make_root_clause(root.id, bottom2);
        auto keys_of = [](const Clause& c) {
            std::vector<std::string> ks;
            for (const auto& cand : c.candidates()) ks.push_back(cand.key);
            return ks;
        };
        CHECK(keys_of(root) == keys_of(replica));
    }

    SUBCASE("candidates only cover a subset of the parent's firings") {
        for (TimePoint t = 1; t <= 2; ++t) {
            auto parent_fires = clause_firings(root, seed, t);
            for (const auto& cand : root.candidates()) {
                std::vector<Literal> body = root.body;
                body.push_back(cand.lit);
                for (const Term& f : ground_instances(root.target_fluent(), seed, t)) {
                    if (fires_on(root.head, body, f, seed, t)) CHECK(parent_fires.count(f) == 1);
                }
            }
        }
    }
}

TEST_CASE("clause body stays connected to the head") {
    Interpretation seed = testing::activity_interpretation();
    ModeSet modes = testing::activity_modes();
    auto bottom = std::make_shared<BottomClause>(
        construct_bottom(seed, 1, parse_term("moving(id1,id2)"), ClauseKind::Initiation, modes));
    Clause c = make_root_clause(make_clause_id("n0", 1), bottom);
    while (!c.candidates().empty()) {
        c = specialize_with(c, c.candidates()[0].key);
        // every body literal shares a variable with the head or an earlier literal
        std::vector<std::string> seen;
        collect_vars(c.head, seen);
        for (const Literal& lit : c.body) {
            std::vector<std::string> lit_vars;
            collect_vars(lit, lit_vars);
            bool shares = std::any_of(lit_vars.begin(), lit_vars.end(), [&](const std::string& v) {
                return std::find(seen.begin(), seen.end(), v) != seen.end();
            });
            CHECK(shares);
            for (const std::string& v : lit_vars) {
                if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
            }
        }
    }
}

TEST_CASE("clause ids are distinct per origin and counter") {
    CHECK(make_clause_id("init/n0", 0) != make_clause_id("init/n0", 1));
    CHECK(make_clause_id("init/n0", 0) != make_clause_id("init/n1", 0));
    CHECK(make_clause_id("init/n0", 7) == make_clause_id("init/n0", 7));
}

TEST_CASE("clause rendering round-trips through the parser") {
    Clause c = parse_clause(
        "initiatedAt(moving(X,Y),T) :- happensAt(walk(X),T), distLessThan(X,Y,25,T).");
    CHECK(render_clause(c) ==
          "initiatedAt(moving(X,Y),T) :- happensAt(walk(X),T), distLessThan(X,Y,25,T).");
    CHECK(c.kind() == ClauseKind::Initiation);
    CHECK(parse_clause("terminatedAt(moving(X,Y),T).").kind() == ClauseKind::Termination);
}
