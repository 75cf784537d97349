#include <doctest.h>

#include "support.hpp"
#include "sysx/controller.hpp"
#include "sysx/generator.hpp"
#include "sysx/orchestrator.hpp"

using namespace sysx;

namespace {

const ProblemSets& mazes() {
    static const ProblemSets s = generate_maze_dataset(1);
    return s;
}

}  // namespace

TEST_CASE("greedy descent") {
    auto corridor = testsupport::maze(1, 4, {}, {0, 0}, {0, 3});
    auto o = greedy_plan(corridor);
    CHECK(o.plan->actions == std::vector<Action>{Move::right, Move::right, Move::right});
    CHECK(o.states_explored == 3);
    CHECK(o.reached);

    // Pocket: the only downhill move from (2,0) leads into a dead end at (2,1).
    auto pocket = testsupport::maze(5, 5, {{1, 1}, {3, 1}, {1, 2}, {2, 2}, {3, 2}}, {2, 0}, {2, 4});
    CHECK(testsupport::grid_distance(pocket) > 0);
    auto g = greedy_plan(pocket);
    CHECK(g.plan->actions == std::vector<Action>{Move::right});
    CHECK_FALSE(g.reached);
    CHECK_FALSE(validate_plan(pocket, *g.plan).valid);
    CHECK(g.states_explored == 1);

    auto b = testsupport::blocks("[A,B][C]", "[A][C,B]");
    auto bo = greedy_plan(b);
    CHECK(bo.plan->actions == std::vector<Action>{BlocksMove{'B', 'C'}});
    CHECK(bo.states_explored == 1);

    auto same = testsupport::maze(3, 3, {}, {1, 1}, {1, 1});
    CHECK(greedy_plan(same).plan->length() == 0);
    CHECK(greedy_plan(same).reached);
}

TEST_CASE("greedy plans never revisit and stay within the step cap") {
    for (const auto& p : mazes().test) {
        auto o = greedy_plan(p);
        auto states = plan_states(p, *o.plan);
        REQUIRE(states);
        std::set<State> seen(states->begin(), states->end());
        CHECK(seen.size() == states->size());
        CHECK(o.plan->length() <= 100);
        CHECK(o.reached == validate_plan(p, *o.plan).valid);
    }
}

TEST_CASE("composition of chained sub-plans") {
    auto p = testsupport::maze(5, 5, {}, {0, 0}, {2, 3});
    MetaPlan mp{{{MazeState{0, 0}, MazeState{1, 1}, Mode::sys1}, {MazeState{1, 1}, MazeState{2, 3}, Mode::sys2}}};
    auto run = solve_hybrid(p, mp, {});
    REQUIRE(run.plan);
    CHECK(run.plan->length() == 5);
    CHECK(run.valid);
    REQUIRE(run.parts.size() == 2);
    CHECK(run.parts[0].plan->length() == 2);
    CHECK(run.parts[1].plan->length() == 3);
    CHECK(run.states_explored == run.parts[0].states_explored + run.parts[1].states_explored);

    MetaPlan broken{{{MazeState{0, 0}, MazeState{1, 1}, Mode::sys1}, {MazeState{1, 2}, MazeState{2, 3}, Mode::sys2}}};
    CHECK_THROWS(solve_hybrid(p, broken, {}));
}

TEST_CASE("budget cuts a middle Sys2 sub-goal") {
    auto p = testsupport::maze(5, 5, {{2, 1}, {2, 2}, {2, 3}}, {0, 0}, {4, 4});
    MetaPlan mp{{{MazeState{0, 0}, MazeState{1, 0}, Mode::sys1},
                 {MazeState{1, 0}, MazeState{3, 2}, Mode::sys2},
                 {MazeState{3, 2}, MazeState{4, 4}, Mode::sys1}}};
    auto full = solve_hybrid(p, mp, {});
    REQUIRE(full.plan);
    CHECK(full.valid);
    const std::size_t sys2_se = full.parts[1].states_explored;
    REQUIRE(sys2_se > 3);

    EnginesConfig tight;
    tight.budget = 1 + 3;
    auto cut = solve_hybrid(p, mp, tight);
    CHECK_FALSE(cut.plan);
    CHECK_FALSE(cut.valid);
    CHECK(cut.parts.size() == 2);
    CHECK(cut.states_explored == 4);

    EnginesConfig enough;
    enough.budget = full.states_explored;
    auto same = solve_hybrid(p, mp, enough);
    CHECK(same.plan == full.plan);
    CHECK(same.states_explored == full.states_explored);
}

TEST_CASE("hybrid validity agrees with the plan validator") {
    auto cal = Calibration::fit(mazes().train, HardnessSelector::maze_obstacles);
    RuntimeController rc({}, cal);
    int n = 0;
    for (const auto& p : mazes().test) {
        if (n++ == 100) break;
        auto run = solve_hybrid(p, rc.decompose(p), {});
        if (run.plan) CHECK(run.valid == validate_plan(p, *run.plan).valid);
        std::size_t sum = 0;
        for (const auto& part : run.parts) sum += part.states_explored;
        CHECK(states_explored(run) == sum);
        // Composition soundness.
        bool all_reached = run.parts.size() == run.meta_plan.subgoals.size();
        for (const auto& part : run.parts) all_reached = all_reached && part.reached;
        if (all_reached) CHECK(run.valid);
    }
}

TEST_CASE("degenerate meta-plans reduce to the bare planners") {
    for (const auto& p : mazes().test) {
        auto sys1 = solve_hybrid(p, single_subgoal(p, Mode::sys1), {});
        auto greedy = greedy_plan(p);
        CHECK(sys1.plan == greedy.plan);
        CHECK(sys1.states_explored == greedy.states_explored);

        auto sys2 = solve_hybrid(p, single_subgoal(p, Mode::sys2), {});
        auto a = astar(p);
        CHECK(sys2.plan == a.plan);
        CHECK(sys2.states_explored == a.states_explored());
    }
}

TEST_CASE("states_explored accounting") {
    PlannerOutcome o;
    o.plan = Plan{{Move::up, Move::up, Move::left, Move::down}};
    o.states_explored = 4;
    CHECK(states_explored(o) == 4);

    HybridRun h;
    for (std::size_t se : {3u, 9u, 2u}) {
        PlannerOutcome part;
        part.states_explored = se;
        h.parts.push_back(part);
        h.states_explored += se;
    }
    CHECK(states_explored(h) == 14);

    auto run = astar(mazes().test.back());
    if (run.states_explored() > 10) CHECK(states_explored(truncate_run(run, 10)) == 10);
    CHECK(to_json(h).at("states_explored") == 14);
}
