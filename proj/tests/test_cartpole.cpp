#include <doctest.h>

#include <cmath>

#include "maxocc/envs/cartpole.hpp"
#include "maxocc/solver.hpp"

using namespace maxocc;

namespace {
CartpoleConfig small_grid(int g = 7) {
    CartpoleConfig config;
    config.grid = g;
    return config;
}
}  // namespace

TEST_SUITE_BEGIN("cartpole");

TEST_CASE("balanced rest with no force does not accelerate") {
    const Accelerations acc = cartpole_derivatives({}, 0.0, CartpoleConfig{});
    CHECK(acc.theta_ddot == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(acc.x_ddot == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("a rightward push at rest tips the pole and the printed formulas hold") {
    const Accelerations acc = cartpole_derivatives({}, 10.0, CartpoleConfig{});
    // exact rationals: -300/41 and -400/41
    CHECK(acc.theta_ddot == doctest::Approx(-7.317073170731707).epsilon(1e-12));
    CHECK(acc.x_ddot == doctest::Approx(-9.75609756097561).epsilon(1e-12));
}

TEST_CASE("a tilted pole at rest falls at the transcription-checked rate") {
    ContinuousState s;
    s.theta = 0.1;
    const Accelerations acc = cartpole_derivatives(s, 0.0, CartpoleConfig{});
    CHECK(acc.theta_ddot == doctest::Approx(-0.787695604087).epsilon(1e-9));
}

TEST_CASE("the textbook linear-acceleration switch flips the sign structure") {
    CartpoleConfig config;
    config.standard_x_accel = true;
    const Accelerations acc = cartpole_derivatives({}, 10.0, config);
    CHECK(acc.theta_ddot == doctest::Approx(-7.317073170731707).epsilon(1e-12));
    CHECK(acc.x_ddot == doctest::Approx(9.75609756097561).epsilon(1e-12));
}

TEST_CASE("one Euler step from rest moves the velocities only") {
    const ContinuousState next = cartpole_step({}, 10.0, 0.02, CartpoleConfig{});
    CHECK(next.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(next.theta == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(next.v == doctest::Approx(-0.1951219512195122).epsilon(1e-12));
    CHECK(next.omega == doctest::Approx(-0.14634146341463414).epsilon(1e-12));
    CHECK(next.alive);
}

TEST_CASE("dead states are unchanged by further steps") {
    ContinuousState dead;
    dead.x = 1.0;
    dead.alive = false;
    const ContinuousState next = cartpole_step(dead, 50.0, 0.02, CartpoleConfig{});
    CHECK_FALSE(next.alive);
    CHECK(next.x == 1.0);
}

TEST_CASE("crossing the angle bound kills the episode") {
    ContinuousState s;
    s.theta = 35.9 * 3.14159265358979323846 / 180.0;
    s.omega = 2.5;
    const ContinuousState next = cartpole_step(s, 0.0, 0.02, CartpoleConfig{});
    CHECK_FALSE(next.alive);
}

TEST_CASE("the discretized model has grid^4 alive states plus one dead state") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    CHECK(model.mdp.n_states() == 5 * 5 * 5 * 5 + 1);
    CHECK(model.dead_state == 625);
    CHECK(model.mdp.available_count(model.dead_state) == 1);
    CHECK(model.mdp.is_absorbing(model.dead_state));
    CHECK_NOTHROW(validate(model.mdp));
}

TEST_CASE("every transition row is a probability distribution") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    for (StateId s = 0; s < model.mdp.n_states(); ++s)
        for (ActionId a = 0; a < model.mdp.n_actions(); ++a) {
            if (!model.mdp.available(s, a)) continue;
            const TransitionRow row = model.mdp.row(s, a);
            double sum = 0.0;
            for (std::size_t i = 0; i < row.size(); ++i) sum += row.prob[i];
            CHECK(std::abs(sum - 1.0) <= 1e-9);
            CHECK(row.size() <= 16);
        }
}

TEST_CASE("the upright center is a fixed point under zero force") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    const int c = 2;  // center index on a 5-point axis
    const StateId center = model.vertex_of(c, c, c, c);
    const ActionId zero_force = 2;
    const TransitionRow row = model.mdp.row(center, zero_force);
    REQUIRE(row.size() == 1);
    CHECK(row.next[0] == center);
    CHECK(row.prob[0] == doctest::Approx(1.0));
}

TEST_CASE("the runtime policy on a grid point matches the extracted policy row") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    SolverConfig config;
    config.tolerance = 1e-9;
    const SolveReport report = solve(model.mdp, config);
    const Policy policy = extract_policy(model.mdp, report.value, build_entropy_cache(model.mdp));
    for (const StateId s : {model.vertex_of(2, 2, 2, 2), model.vertex_of(1, 2, 3, 2),
                            model.vertex_of(2, 1, 2, 3)}) {
        const std::vector<double> runtime = cartpole_runtime_policy(model, report.value,
                                                                    model.vertex_state(s));
        for (ActionId a = 0; a < 5; ++a)
            CHECK(runtime[a] == doctest::Approx(policy.at(s, a)).epsilon(1e-9));
    }
}

TEST_CASE("mirrored states produce mirrored action distributions") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    SolverConfig config;
    config.tolerance = 1e-9;
    const SolveReport report = solve(model.mdp, config);
    ContinuousState s;
    s.x = 0.31;
    s.v = -0.62;
    s.theta = 0.05;
    s.omega = 0.41;
    ContinuousState m;
    m.x = -s.x;
    m.v = -s.v;
    m.theta = -s.theta;
    m.omega = -s.omega;
    const std::vector<double> p = cartpole_runtime_policy(model, report.value, s);
    const std::vector<double> q = cartpole_runtime_policy(model, report.value, m);
    for (std::size_t a = 0; a < 5; ++a)
        CHECK(p[a] == doctest::Approx(q[4 - a]).epsilon(1e-9));
}

TEST_CASE("solved values respect the mirror symmetry of the dynamics") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    SolverConfig config;
    config.tolerance = 1e-9;
    const SolveReport report = solve(model.mdp, config);
    const int g = 5;
    for (int ix = 0; ix < g; ++ix)
        for (int iv = 0; iv < g; ++iv)
            for (int it = 0; it < g; ++it)
                for (int io = 0; io < g; ++io) {
                    const double a = report.value.values[model.vertex_of(ix, iv, it, io)];
                    const double b = report.value.values[model.vertex_of(g - 1 - ix, g - 1 - iv,
                                                                         g - 1 - it, g - 1 - io)];
                    CHECK(std::abs(a - b) <= 1e-6);
                }
}

TEST_CASE("one step from certain death every force looks the same") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    SolverConfig config;
    config.tolerance = 1e-6;
    const SolveReport report = solve(model.mdp, config);
    ContinuousState s;
    s.theta = 0.6;  // next theta = 0.6 + 0.02 * 2.0 > bound for every force
    s.omega = 2.0;
    const std::vector<double> p = cartpole_runtime_policy(model, report.value, s);
    for (const double v : p) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("interpolation at a vertex returns the vertex value") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    std::vector<double> values(model.mdp.n_states(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i % 97);
    const StateId s = model.vertex_of(1, 3, 2, 4);
    CHECK(model.interpolate(values, model.vertex_state(s)) ==
          doctest::Approx(values[s]).epsilon(1e-12));
}

TEST_CASE("the reward model pays for survival minus the scaled magnitudes") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    const RewardModel rewards = cartpole_rewards(model);
    const StateId center = model.vertex_of(2, 2, 2, 2);
    CHECK(rewards(center, 0, model.dead_state) == 0.0);
    CHECK(rewards(center, 0, center) == doctest::Approx(1.0));
    const StateId edge = model.vertex_of(4, 4, 4, 4);
    CHECK(rewards(center, 0, edge) == doctest::Approx(1.0 - 1e-5).epsilon(1e-12));
}

TEST_CASE("seeded cartpole episodes are reproducible") {
    const CartpoleModel model = build_cartpole(small_grid(5));
    SolverConfig config;
    config.tolerance = 1e-6;
    const SolveReport report = solve(model.mdp, config);
    const CartpoleEpisode a = run_cartpole_episode(model, report.value, CartpoleAgent::entropy,
                                                   0.0, 2000, SeededRng(9, 3));
    const CartpoleEpisode b = run_cartpole_episode(model, report.value, CartpoleAgent::entropy,
                                                   0.0, 2000, SeededRng(9, 3));
    CHECK(a.survival == b.survival);
    CHECK(a.mean_return == b.mean_return);
    CHECK(a.theta_hist == b.theta_hist);
    CHECK(a.x_theta_hist == b.x_theta_hist);
}

TEST_CASE("an even grid is rejected") {
    CartpoleConfig config;
    config.grid = 30;
    CHECK_THROWS_AS(build_cartpole(config), DomainError);
}

TEST_SUITE_END();
