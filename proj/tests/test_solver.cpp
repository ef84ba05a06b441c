#include <doctest.h>

#include <cmath>

#include "maxocc/baseline.hpp"
#include "maxocc/envs/four_room.hpp"
#include "maxocc/rng.hpp"
#include "maxocc/solver.hpp"
#include "maxocc/verify.hpp"
#include "support.hpp"

using namespace maxocc;
using test::make_mdp;
using test::self_loop_mdp;
using test::two_state_symmetric;

namespace {

SolverConfig tight(double tol = 1e-9) {
    SolverConfig config;
    config.tolerance = tol;
    return config;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

// Ascend the summed policy value with finite-difference gradients on softmax
// logits. Slow and simple on purpose: it shares no code with the solver.
Policy gradient_ascent_policy(const Mdp& mdp, int iterations) {
    const std::size_t na = mdp.n_actions();
    std::vector<double> logits(mdp.n_states() * na, 0.0);
    const auto to_policy = [&](const std::vector<double>& th) {
        Policy policy(mdp.n_states(), na);
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            double hi = -1e300;
            for (ActionId a = 0; a < na; ++a)
                if (mdp.available(s, a)) hi = std::max(hi, th[s * na + a]);
            double sum = 0.0;
            for (ActionId a = 0; a < na; ++a)
                if (mdp.available(s, a)) sum += std::exp(th[s * na + a] - hi);
            for (ActionId a = 0; a < na; ++a)
                if (mdp.available(s, a)) policy.at(s, a) = std::exp(th[s * na + a] - hi) / sum;
        }
        return policy;
    };
    const auto objective = [&](const std::vector<double>& th) {
        const ValueFunction v = evaluate_policy_entropy(mdp, to_policy(th));
        double sum = 0.0;
        for (const double x : v.values) sum += x;
        return sum;
    };
    double lr = 0.5;
    double best = objective(logits);
    const double h = 1e-6;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> grad(logits.size(), 0.0);
        for (std::size_t i = 0; i < logits.size(); ++i) {
            const StateId s = static_cast<StateId>(i / na);
            const ActionId a = static_cast<ActionId>(i % na);
            if (!mdp.available(s, a)) continue;
            std::vector<double> up = logits, down = logits;
            up[i] += h;
            down[i] -= h;
            grad[i] = (objective(up) - objective(down)) / (2.0 * h);
        }
        std::vector<double> next = logits;
        for (std::size_t i = 0; i < logits.size(); ++i) next[i] += lr * grad[i];
        const double value = objective(next);
        if (value >= best) {
            best = value;
            logits = std::move(next);
            lr *= 1.05;
        } else {
            lr *= 0.5;
            if (lr < 1e-12) break;
        }
    }
    return to_policy(logits);
}

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("z_step keeps an absorbing state at its fixed point") {
    const Mdp mdp = self_loop_mdp(1, 0.9);
    const EntropyCache cache = build_entropy_cache(mdp);
    const std::vector<double> z = {1.0};
    const std::vector<double> next = z_step(z, mdp, cache);
    CHECK(next[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("z_step from ones on nine self-loops raises nine to gamma") {
    const Mdp mdp = self_loop_mdp(9, 0.99);
    const EntropyCache cache = build_entropy_cache(mdp);
    const std::vector<double> z = {1.0};
    const std::vector<double> next = z_step(z, mdp, cache);
    CHECK(next[0] == doctest::Approx(std::pow(9.0, 0.99)).epsilon(1e-14));
    CHECK(next[0] == doctest::Approx(8.804406471562541).epsilon(1e-9));
}

TEST_CASE("z_step rejects non-positive inputs") {
    const Mdp mdp = self_loop_mdp(2, 0.9);
    const EntropyCache cache = build_entropy_cache(mdp);
    const std::vector<double> zero = {0.0};
    CHECK_THROWS_AS(z_step(zero, mdp, cache), NonPositiveInput);
    const std::vector<double> neg = {-1.0};
    CHECK_THROWS_AS(z_step(neg, mdp, cache), NonPositiveInput);
}

TEST_CASE("z_step from ones never drops below one") {
    SeededRng rng(23, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const Mdp mdp = random_mdp(rng, 12, 4, 0.9, 1.0, trial % 2 ? 1.0 : 0.0);
        const EntropyCache cache = build_entropy_cache(mdp);
        const std::vector<double> ones(12, 1.0);
        for (const double v : z_step(ones, mdp, cache)) CHECK(v >= 1.0 - 1e-12);
    }
}

TEST_CASE("nine self-loop actions have closed-form value at two discounts") {
    for (const double gamma : {0.9, 0.99}) {
        const Mdp mdp = self_loop_mdp(9, gamma);
        const SolveReport report = solve(mdp, tight());
        CHECK(report.value.values[0] ==
              doctest::Approx(std::log(9.0) / (1.0 - gamma)).epsilon(1e-6));
        CHECK(report.residual <= 10.0 * 1e-9);
        CHECK(report.z[0] >= 1.0 - 1e-9);
    }
}

TEST_CASE("two symmetric states at gamma one half solve to two ln two") {
    const Mdp mdp = two_state_symmetric(0.5);
    const SolveReport report = solve(mdp, tight(1e-12));
    for (const double v : report.value.values)
        CHECK(v == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
    for (const double z : report.z) CHECK(z == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("absorbing-only models have zero value everywhere") {
    const Mdp mdp = make_mdp(3, 1, 0.95, {{0, 0, {{0, 1.0}}}, {1, 0, {{1, 1.0}}}, {2, 0, {{2, 1.0}}}});
    const SolveReport report = solve(mdp, tight());
    for (const double v : report.value.values) CHECK(std::abs(v) <= 1e-12);
    CHECK(report.iterations >= 1);
}

TEST_CASE("the iteration cap raises with the last iterate attached") {
    const Mdp mdp = self_loop_mdp(9, 0.99);
    SolverConfig config;
    config.tolerance = 1e-12;
    config.max_iterations = 3;
    try {
        solve(mdp, config);
        FAIL("expected MaxIterationsExceeded");
    } catch (const MaxIterationsExceeded& e) {
        CHECK(e.iterations == 3);
        CHECK(e.last_values.size() == 1);
        CHECK(e.last_values[0] > 0.0);
    }
}

TEST_CASE("a negative tolerance is rejected") {
    const Mdp mdp = self_loop_mdp(2, 0.9);
    SolverConfig config;
    config.tolerance = -1.0;
    CHECK_THROWS_WITH_AS(solve(mdp, config), "tolerance must be positive", DomainError);
}

TEST_CASE("main series grows monotonically and respects the growth bound") {
    SeededRng rng(29, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 15, 4, 0.9, 1.0, 1.0);
        const EntropyCache cache = build_entropy_cache(mdp);
        double h_max = 0.0;
        std::size_t a_max = 0;
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            a_max = std::max(a_max, mdp.available_count(s));
            for (ActionId a = 0; a < mdp.n_actions(); ++a) h_max = std::max(h_max, cache.at(s, a));
        }
        const double log_cap = (std::log(static_cast<double>(a_max)) + h_max) / (1.0 - mdp.gamma());
        std::vector<double> prev(mdp.n_states(), 0.0);
        bool monotone = true, bounded = true;
        solve(mdp, tight(1e-10), [&](std::uint64_t, std::span<const double> log_z) {
            for (std::size_t i = 0; i < log_z.size(); ++i) {
                monotone = monotone && log_z[i] >= prev[i] - 1e-12;
                bounded = bounded && log_z[i] <= log_cap + 1e-9;
            }
            std::copy(log_z.begin(), log_z.end(), prev.begin());
        });
        CHECK(monotone);
        CHECK(bounded);
    }
}

TEST_CASE("twenty random positive inits land on the same values") {
    SeededRng rng(31, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const Mdp mdp = random_mdp(rng, 30, 4, 0.9);
        const SolveReport base = solve(mdp, tight(1e-12));
        for (int init_trial = 0; init_trial < 20; ++init_trial) {
            SolverConfig config = tight(1e-12);
            config.init.resize(30);
            for (double& v : config.init) v = 1e-3 + 1000.0 * rng.next_double();
            const SolveReport other = solve(mdp, config);
            CHECK(sup_diff(other.value.values, base.value.values) <= 1e-6);
        }
    }
}

TEST_CASE("values stay inside the entropy bound") {
    SeededRng rng(37, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 20, 5, 0.9, 1.0, 1.0);
        const SolveReport report = solve(mdp, tight());
        const double cap = std::log(5.0 * 20.0) / (1.0 - mdp.gamma());
        for (const double v : report.value.values) {
            CHECK(v >= -1e-12);
            CHECK(v <= cap + 1e-9);
        }
        CHECK(value_upper_bound(mdp) <= cap + 1e-9);
    }
}

TEST_CASE("extract_policy splits symmetric actions evenly and honors absorption") {
    const Mdp sym = two_state_symmetric(0.5);
    const SolveReport report = solve(sym, tight(1e-12));
    const Policy policy = extract_policy(sym, report.value, build_entropy_cache(sym));
    for (StateId s = 0; s < 2; ++s)
        for (ActionId a = 0; a < 2; ++a) CHECK(policy.at(s, a) == doctest::Approx(0.5).epsilon(1e-9));

    const Mdp absorbing = self_loop_mdp(1, 0.9);
    const SolveReport rep2 = solve(absorbing, tight());
    const Policy point = extract_policy(absorbing, rep2.value, build_entropy_cache(absorbing));
    CHECK(point.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("extract_policy matches a finite-difference ascent oracle") {
    // three states, deterministic asymmetric moves
    const Mdp mdp = make_mdp(3, 2, 0.9,
                             {{0, 0, {{0, 1.0}}},
                              {0, 1, {{1, 1.0}}},
                              {1, 0, {{2, 1.0}}},
                              {1, 1, {{0, 1.0}}},
                              {2, 0, {{1, 1.0}}}});
    const SolveReport report = solve(mdp, tight(1e-13));
    const Policy solved = extract_policy(mdp, report.value, build_entropy_cache(mdp));
    const Policy ascended = gradient_ascent_policy(mdp, 4000);
    for (StateId s = 0; s < 3; ++s)
        for (ActionId a = 0; a < 2; ++a)
            CHECK(std::abs(solved.at(s, a) - ascended.at(s, a)) <= 1e-6);
}

TEST_CASE("bellman residual pins the closed form and the all-zeros guess") {
    const Mdp mdp = self_loop_mdp(9, 0.99);
    const EntropyCache cache = build_entropy_cache(mdp);
    ValueFunction exact;
    exact.values = {std::log(9.0) / 0.01};
    CHECK(bellman_residual(mdp, exact, cache) <= 1e-10);
    ValueFunction zeros;
    zeros.values = {0.0};
    CHECK(bellman_residual(mdp, zeros, cache) ==
          doctest::Approx(2.1972245773362196).epsilon(1e-12));
}

TEST_CASE("bellman residual of a tight solve stays tiny on random models") {
    SeededRng rng(41, 0);
    const Mdp mdp = random_mdp(rng, 20, 4, 0.9);
    const SolveReport report = solve(mdp, tight(1e-9));
    CHECK(bellman_residual(mdp, report.value, build_entropy_cache(mdp)) < 1e-7);
}

TEST_CASE("policy evaluation of the extracted policy reproduces the solved values") {
    SeededRng rng(43, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 25, 4, 0.88, 1.0, trial % 2 ? 1.0 : 0.0);
        const SolveReport report = solve(mdp, tight(1e-12));
        const Policy policy = extract_policy(mdp, report.value, build_entropy_cache(mdp));
        const ValueFunction evaluated = evaluate_policy_entropy(mdp, policy);
        CHECK(sup_diff(evaluated.values, report.value.values) <= 1e-6);
    }
}

TEST_CASE("perturbed policies never beat the solved values") {
    SeededRng rng(47, 0);
    const Mdp mdp = random_mdp(rng, 15, 4, 0.9);
    const SolveReport report = solve(mdp, tight(1e-12));
    const Policy policy = extract_policy(mdp, report.value, build_entropy_cache(mdp));
    for (int trial = 0; trial < 30; ++trial) {
        Policy perturbed = policy;
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            double sum = 0.0;
            for (ActionId a = 0; a < mdp.n_actions(); ++a) {
                if (!mdp.available(s, a)) continue;
                perturbed.at(s, a) *= std::exp(0.5 * (rng.next_double() - 0.5));
                sum += perturbed.at(s, a);
            }
            for (ActionId a = 0; a < mdp.n_actions(); ++a) perturbed.at(s, a) /= sum;
        }
        const ValueFunction evaluated = evaluate_policy_entropy(mdp, perturbed);
        for (std::size_t i = 0; i < evaluated.values.size(); ++i)
            CHECK(evaluated.values[i] <= report.value.values[i] + 1e-9);
    }
}

TEST_CASE("relative-entropy solve with a forced prior on a single-action chain is zero") {
    const Mdp chain = make_mdp(3, 1, 0.9, {{0, 0, {{1, 1.0}}}, {1, 0, {{2, 1.0}}}, {2, 0, {{0, 1.0}}}});
    PriorPolicy prior(3, 1);
    for (StateId s = 0; s < 3; ++s) prior.at(s, 0) = 1.0;
    const SolveReport report = solve_kl(chain, prior, tight(1e-12));
    for (const double v : report.value.values) CHECK(std::abs(v) <= 1e-12);
    const Policy policy = extract_policy(chain, report.value, build_entropy_cache(chain), prior);
    for (StateId s = 0; s < 3; ++s) CHECK(policy.at(s, 0) == doctest::Approx(1.0));
}

TEST_CASE("uniform prior on constant action counts shifts values by ln nine") {
    // torus-like model: every state keeps exactly nine stochastic actions
    SeededRng rng(53, 0);
    MdpBuilder builder(12, 9, 0.9, 1.0, 0.0);
    for (StateId s = 0; s < 12; ++s)
        for (ActionId a = 0; a < 9; ++a) {
            builder.begin_row(s, a);
            const StateId j1 = static_cast<StateId>(rng.next_u64() % 12);
            StateId j2 = static_cast<StateId>(rng.next_u64() % 12);
            if (j2 == j1) j2 = static_cast<StateId>((j1 + 1) % 12);
            const double w = 0.25 + 0.5 * rng.next_double();
            if (j1 < j2) {
                builder.add(j1, w);
                builder.add(j2, 1.0 - w);
            } else {
                builder.add(j2, 1.0 - w);
                builder.add(j1, w);
            }
        }
    const Mdp mdp = builder.finish();
    const SolveReport absolute = solve(mdp, tight(1e-12));
    const SolveReport relative = solve_kl(mdp, uniform_prior(mdp), tight(1e-12));
    const double offset = std::log(9.0) / (1.0 - 0.9);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(absolute.value.values[i] - relative.value.values[i] ==
              doctest::Approx(offset).epsilon(1e-6));
    const EntropyCache cache = build_entropy_cache(mdp);
    const Policy pa = extract_policy(mdp, absolute.value, cache);
    const Policy pr = extract_policy(mdp, relative.value, cache, uniform_prior(mdp));
    CHECK(sup_diff(pa.rows, pr.rows) <= 1e-9);
}

TEST_CASE("uniform prior penalizes action-rich states when counts differ") {
    const Mdp mdp = make_mdp(2, 3, 0.9,
                             {{0, 0, {{0, 1.0}}},
                              {0, 1, {{1, 1.0}}},
                              {0, 2, {{0, 0.5}, {1, 0.5}}},
                              {1, 0, {{0, 1.0}}}});
    std::size_t min_actions = 3;
    for (StateId s = 0; s < 2; ++s) min_actions = std::min(min_actions, mdp.available_count(s));
    const SolveReport absolute = solve(mdp, tight(1e-12));
    const SolveReport relative = solve_kl(mdp, uniform_prior(mdp), tight(1e-12));
    const double min_offset = std::log(static_cast<double>(min_actions)) / (1.0 - 0.9);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(relative.value.values[i] <= absolute.value.values[i] - min_offset + 1e-9);
    const EntropyCache cache = build_entropy_cache(mdp);
    const Policy pa = extract_policy(mdp, absolute.value, cache);
    const Policy pr = extract_policy(mdp, relative.value, cache, uniform_prior(mdp));
    CHECK(sup_diff(pa.rows, pr.rows) > 1e-6);
}

TEST_CASE("a zero-mass prior on an available action is rejected") {
    const Mdp mdp = two_state_symmetric(0.5);
    PriorPolicy prior(2, 2);
    prior.at(0, 0) = 1.0;  // zero on the available switch action
    prior.at(1, 0) = 0.5;
    prior.at(1, 1) = 0.5;
    CHECK_THROWS_AS(solve_kl(mdp, prior, tight()), NonPositiveInput);
}

TEST_CASE("the single-successor solver matches the general one") {
    const Mdp sym = two_state_symmetric(0.5);
    const SolveReport det = solve_deterministic(sym, tight(1e-12));
    CHECK(det.value.values[0] == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
    CHECK(det.z[0] == doctest::Approx(2.0).epsilon(1e-9));

    const Mdp slice = four_room_movement_graph(FourRoomConfig{});
    const SolveReport general = solve(slice, tight(1e-11));
    const SolveReport special = solve_deterministic(slice, tight(1e-11));
    CHECK(sup_diff(general.value.values, special.value.values) <= 1e-9);

    const Mdp loop = self_loop_mdp(1, 0.9);
    CHECK(solve_deterministic(loop, tight()).z[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the single-successor solver rejects stochastic rows") {
    const Mdp stochastic =
        make_mdp(2, 1, 0.9, {{0, 0, {{0, 0.5}, {1, 0.5}}}, {1, 0, {{1, 1.0}}}});
    CHECK_THROWS_AS(solve_deterministic(stochastic, tight()), NotDeterministic);
}

TEST_CASE("masking actions drops values by the predicted closed form") {
    const Mdp mdp = self_loop_mdp(9, 0.99);
    const Mdp same = mask_actions(mdp, {});
    CHECK(same.to_json() == mdp.to_json());
    const Mdp masked = mask_actions(mdp, {{0, 4}});
    const SolveReport report = solve(masked, tight());
    CHECK(report.value.values[0] == doctest::Approx(207.94415416798358).epsilon(1e-6));
}

TEST_CASE("masking everything a state has is refused") {
    const Mdp mdp = self_loop_mdp(2, 0.9);
    CHECK_THROWS_AS(mask_actions(mdp, {{0, 0}, {0, 1}}), NoActionError);
}

TEST_CASE("masking never raises any value on random models") {
    SeededRng rng(59, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 12, 4, 0.9);
        const SolveReport base = solve(mdp, tight(1e-11));
        std::vector<std::pair<StateId, ActionId>> forbidden;
        for (StateId s = 0; s < mdp.n_states(); ++s)
            if (mdp.available_count(s) > 1)
                for (ActionId a = 0; a < mdp.n_actions(); ++a)
                    if (mdp.available(s, a) && rng.next_double() < 0.3) {
                        forbidden.emplace_back(s, a);
                        break;
                    }
        if (forbidden.empty()) continue;
        const SolveReport masked = solve(mask_actions(mdp, forbidden), tight(1e-11));
        for (std::size_t i = 0; i < mdp.n_states(); ++i)
            CHECK(masked.value.values[i] <= base.value.values[i] + 1e-9);
    }
}

TEST_SUITE_END();
