#include <doctest.h>

#include <cmath>

#include "maxocc/envs/prey_predator.hpp"
#include "maxocc/solver.hpp"

using namespace maxocc;

TEST_SUITE_BEGIN("prey_predator");

TEST_CASE("the arena has 33 agent cells and 26 predator cells") {
    const PreyPredatorModel model = build_prey_predator(PreyPredatorConfig{});
    CHECK(model.agent_cells.size() == 33);
    CHECK(model.predator_cells.size() == 26);
    CHECK_NOTHROW(validate(model.mdp));
    // collapsed state space: alive (agent, predator, energy) triples plus one
    // dead state
    CHECK(model.n_pairs == 832);
    CHECK(model.mdp.n_states() == 832 * 15 + 1);
}

TEST_CASE("the predator zone excludes the home block and the door") {
    const PreyPredatorModel model = build_prey_predator(PreyPredatorConfig{});
    for (const Cell c : model.predator_cells) {
        CHECK(c.x >= 3);
        CHECK_FALSE(c.x == 2 && c.y == 1);
    }
    // and the obstacle column cells are off-limits for everyone
    for (const Cell c : model.agent_cells) CHECK_FALSE(c.x == 6 && (c.y == 1 || c.y == 2));
}

TEST_CASE("capture collapses into a single absorbing state") {
    const PreyPredatorModel model = build_prey_predator(PreyPredatorConfig{});
    CHECK(model.mdp.available_count(model.dead_state) == 1);
    CHECK(model.mdp.is_absorbing(model.dead_state));
}

TEST_CASE("the food cell refills the reservoir") {
    const PreyPredatorModel model = build_prey_predator(PreyPredatorConfig{});
    // find an alive state with the agent on food and low energy
    const std::uint32_t food = model.food_cell;
    std::uint32_t predator = 0;  // any predator cell away from food
    while (model.predator_cells[predator] == model.agent_cells[food]) ++predator;
    const StateId s = model.state_of(food, predator, 3);
    const TransitionRow row = model.mdp.row(s, kStayMove);
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row.next[i] == model.dead_state) continue;  // captured branches
        CHECK(model.energy_of(row.next[i]) == 15);
    }
}

TEST_CASE("energy exhaustion away from food leads to the dead state") {
    const PreyPredatorModel model = build_prey_predator(PreyPredatorConfig{});
    const StateId s = model.start_state;  // agent at home, u = F
    // walk the energy down by constructing the state directly
    const StateId low = model.state_of(model.agent_cell_of(s), model.predator_cell_of(s), 1);
    const TransitionRow row = model.mdp.row(low, kStayMove);
    REQUIRE(row.size() == 1);
    CHECK(row.next[0] == model.dead_state);
}

TEST_CASE("a flat predator is uniform over its available moves") {
    const std::vector<Cell> moves = {{0, 1}, {0, -1}, {1, 0}, {0, 0}};
    const std::vector<double> p = predator_step_distribution({5, 2}, {8, 2}, 0.0, moves);
    for (const double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("two opposed moves at kappa two follow the logistic split") {
    const std::vector<Cell> moves = {{1, 0}, {-1, 0}};
    const std::vector<double> p = predator_step_distribution({0, 0}, {3, 0}, 2.0, moves);
    CHECK(p[0] == doctest::Approx(0.9820137900379085).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.017986209962091555).epsilon(1e-12));
}

TEST_CASE("a full nine-move set matches the hand softmax and points at the prey") {
    // predator adjacent-left of the agent
    const Cell predator{4, 2}, agent{5, 2};
    std::vector<Cell> moves(kMoves.begin(), kMoves.end());
    const std::vector<double> p = predator_step_distribution(predator, agent, 2.0, moves);
    // by hand: cos of each move against the unit radius vector (1, 0)
    std::vector<double> expect(moves.size());
    double norm = 0.0;
    for (std::size_t k = 0; k < moves.size(); ++k) {
        const double dn = std::hypot(moves[k].x, moves[k].y);
        const double c = dn == 0.0 ? 0.0 : moves[k].x / dn;
        expect[k] = std::exp(2.0 * c);
        norm += expect[k];
    }
    std::size_t best = 0;
    for (std::size_t k = 0; k < moves.size(); ++k) {
        expect[k] /= norm;
        CHECK(p[k] == doctest::Approx(expect[k]).epsilon(1e-12));
        if (p[k] > p[best]) best = k;
    }
    CHECK(moves[best].x == 1);
    CHECK(moves[best].y == 0);
}

TEST_CASE("the stay move scores a zero cosine") {
    const std::vector<Cell> moves = {{0, 0}, {1, 0}};
    const std::vector<double> p = predator_step_distribution({0, 0}, {2, 0}, 1.0, moves);
    CHECK(p[1] / p[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("solving a small instance stays within the entropy bound") {
    PreyPredatorConfig config;
    config.F = 3;
    const PreyPredatorModel model = build_prey_predator(config);
    SolverConfig sc;
    sc.tolerance = 1e-6;
    const SolveReport report = solve(model.mdp, sc);
    const double cap = value_upper_bound(model.mdp);
    for (const double v : report.value.values) {
        CHECK(v >= -1e-12);
        CHECK(v <= cap + 1e-9);
    }
    CHECK(report.value.values[model.dead_state] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_SUITE_END();
