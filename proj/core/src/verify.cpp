#include "maxocc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "maxocc/solver.hpp"

namespace maxocc {

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}
}  // namespace

Mdp random_mdp(SeededRng& rng, std::size_t n_states, std::size_t n_actions, double gamma,
               double alpha, double beta) {
    MdpBuilder builder(n_states, n_actions, gamma, alpha, beta);
    for (StateId s = 0; s < n_states; ++s) {
        const ActionId keep = static_cast<ActionId>(rng.next_u64() % n_actions);
        for (ActionId a = 0; a < n_actions; ++a) {
            if (a != keep && rng.next_double() < 0.3) continue;  // unavailable
            const std::size_t support = 1 + rng.next_u64() % std::min<std::size_t>(4, n_states);
            std::vector<StateId> succ;
            while (succ.size() < support) {
                const StateId j = static_cast<StateId>(rng.next_u64() % n_states);
                if (std::find(succ.begin(), succ.end(), j) == succ.end()) succ.push_back(j);
            }
            std::sort(succ.begin(), succ.end());
            std::vector<double> w(support);
            double sum = 0.0;
            for (double& v : w) {
                v = 0.05 + rng.next_double();
                sum += v;
            }
            builder.begin_row(s, a);
            for (std::size_t i = 0; i < support; ++i) builder.add(succ[i], w[i] / sum);
        }
    }
    return builder.finish();
}

PathChain random_chain(SeededRng& rng, std::size_t n_nodes, double k) {
    PathChain chain;
    chain.n_nodes = n_nodes;
    chain.k_const = k;
    chain.p.assign(n_nodes * n_nodes, 0.0);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n_nodes; ++j) {
            const double v = rng.next_double() < 0.25 ? 0.0 : 0.05 + rng.next_double();
            chain.p[i * n_nodes + j] = v;
            sum += v;
        }
        if (sum == 0.0) {
            chain.p[i * n_nodes + i] = 1.0;
            continue;
        }
        for (std::size_t j = 0; j < n_nodes; ++j) chain.p[i * n_nodes + j] /= sum;
    }
    chain.validate();
    return chain;
}

PathChain random_layered_chain(SeededRng& rng, std::size_t levels, std::size_t width, double k) {
    // node 0 is the start, then `levels` layers of `width` nodes, then the sink
    const std::size_t n = 1 + levels * width + 1;
    PathChain chain;
    chain.n_nodes = n;
    chain.k_const = k;
    chain.p.assign(n * n, 0.0);
    const std::size_t sink = n - 1;
    auto fill_row = [&](std::size_t from, std::size_t first, std::size_t count) {
        double sum = 0.0;
        std::vector<double> w(count);
        for (double& v : w) {
            v = 0.05 + rng.next_double();
            sum += v;
        }
        for (std::size_t j = 0; j < count; ++j) chain.p[from * n + first + j] = w[j] / sum;
    };
    fill_row(0, 1, width);
    for (std::size_t level = 0; level + 1 < levels; ++level)
        for (std::size_t i = 0; i < width; ++i)
            fill_row(1 + level * width + i, 1 + (level + 1) * width, width);
    if (levels > 0)
        for (std::size_t i = 0; i < width; ++i) fill_row(1 + (levels - 1) * width + i, sink, 1);
    chain.p[sink * n + sink] = 1.0;
    chain.validate();
    return chain;
}

TwoStepChain random_two_step_chain(SeededRng& rng, std::size_t n_a0, std::size_t n_s1,
                                   std::size_t n_a1, std::size_t n_s2,
                                   bool state_independent_actions) {
    auto fill = [&](std::vector<double>& v, std::size_t rows, std::size_t cols) {
        v.assign(rows * cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                v[r * cols + c] = 0.05 + rng.next_double();
                sum += v[r * cols + c];
            }
            for (std::size_t c = 0; c < cols; ++c) v[r * cols + c] /= sum;
        }
    };
    TwoStepChain chain;
    chain.n_a0 = n_a0;
    chain.n_s1 = n_s1;
    chain.n_a1 = n_a1;
    chain.n_s2 = n_s2;
    fill(chain.pi0, 1, n_a0);
    fill(chain.p1, n_a0, n_s1);
    fill(chain.pi1, n_s1, n_a1);
    if (state_independent_actions)
        for (std::size_t s = 1; s < n_s1; ++s)
            std::copy(chain.pi1.begin(), chain.pi1.begin() + n_a1, chain.pi1.begin() + s * n_a1);
    fill(chain.p2, n_s1 * n_a1, n_s2);
    chain.validate();
    return chain;
}

namespace {

CheckResult check_path_additivity(SeededRng& rng, const GainFn& gain) {
    const GainFn g = gain ? gain : GainFn([](double p, double k) { return occupancy_gain(p, k); });
    // gain sanity: zero at certainty, strictly decreasing, positive below 1
    if (std::abs(g(1.0, 1.0)) > 1e-12 || !(g(0.3, 1.0) > g(0.7, 1.0)) || !(g(0.7, 1.0) > 0.0))
        return {"path-occupancy-additivity", false, "gain shape violated"};
    // fair-coin branch into two absorbing nodes: occupancy must equal ln 2
    PathChain coin;
    coin.n_nodes = 3;
    coin.p = {0.0, 0.5, 0.5, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    const OccupancyPair probe = path_occupancy(coin, 0, 2, gain);
    if (std::abs(probe.global - std::log(2.0)) > 1e-12 ||
        std::abs(probe.local - std::log(2.0)) > 1e-12)
        return {"path-occupancy-additivity", false, "fair-coin probe off"};
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t nodes = 2 + rng.next_u64() % 5;
        const PathChain chain = random_chain(rng, nodes);
        const std::size_t n = 1 + rng.next_u64() % 5;
        const std::size_t start = rng.next_u64() % nodes;
        const OccupancyPair pair = path_occupancy(chain, start, n, gain);
        worst = std::max(worst, std::abs(pair.global - pair.local));
    }
    return {"path-occupancy-additivity", worst <= 1e-10, "max |global-local| = " + fmt(worst)};
}

CheckResult check_discounted_equality(SeededRng& rng, const GainFn& gain) {
    const double gammas[3] = {0.5, 0.9, 0.99};
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const PathChain chain = random_layered_chain(rng, 2, 2);
        const double gamma = gammas[trial % 3];
        const GeometricHorizon horizon =
            GeometricHorizon::with_tail_bound(gamma, chain.n_nodes, chain.k_const);
        const OccupancyPair pair = discounted_occupancy(chain, 0, horizon, gain);
        worst = std::max(worst, std::abs(pair.global - pair.local));
    }
    return {"discounted-occupancy-equality", worst <= 1e-8, "max |global-local| = " + fmt(worst)};
}

CheckResult check_mi_counterexample() {
    const TwoStepChain chain = counterexample_chain();
    const MiTerms terms = mi_discriminating_terms(chain);
    const double want_global = -1.5 * std::log(2.0);
    const double want_local = -0.5 * std::log(2.0);
    const double gap = terms.local_term - terms.global_term;
    const bool pass = std::abs(terms.global_term - want_global) <= 1e-12 &&
                      std::abs(terms.local_term - want_local) <= 1e-12 &&
                      gap >= std::log(2.0) - 1e-9 &&
                      std::abs(mi_global(chain) - mi_local(chain) - std::log(2.0)) <= 1e-12;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "terms %.5f vs %.5f, gap %.5f", terms.global_term,
                  terms.local_term, gap);
    return {"mi-counterexample", pass, buf};
}

CheckResult check_mi_nonnegative(SeededRng& rng) {
    double lowest = 0.0;
    double worst_eq = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const TwoStepChain chain = random_two_step_chain(rng, 2, 3, 2, 3, false);
        lowest = std::min({lowest, mi_global(chain), mi_local(chain)});
        const TwoStepChain product = random_two_step_chain(rng, 2, 3, 2, 3, true);
        const MiTerms t = mi_discriminating_terms(product);
        worst_eq = std::max(worst_eq, std::abs(t.global_term - t.local_term));
    }
    return {"mi-nonnegativity", lowest >= -1e-12 && worst_eq <= 1e-12,
            "min MI = " + fmt(lowest) + ", state-independent gap = " + fmt(worst_eq)};
}

CheckResult check_monotone_bounded(SeededRng& rng) {
    bool pass = true;
    std::string detail = "ok";
    for (int trial = 0; trial < 20 && pass; ++trial) {
        const Mdp mdp = random_mdp(rng, 20, 5, 0.9);
        const EntropyCache cache = build_entropy_cache(mdp);
        double h_max = 0.0;
        std::size_t a_max = 0;
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            a_max = std::max(a_max, mdp.available_count(s));
            for (ActionId a = 0; a < mdp.n_actions(); ++a) h_max = std::max(h_max, cache.at(s, a));
        }
        const double log_bound =
            (std::log(static_cast<double>(a_max)) + h_max) / (1.0 - mdp.gamma());
        std::vector<double> prev(mdp.n_states(), 0.0);
        SolverConfig config;
        config.tolerance = 1e-10;
        const auto observer = [&](std::uint64_t, std::span<const double> log_z) {
            for (std::size_t i = 0; i < log_z.size(); ++i) {
                if (log_z[i] < prev[i] - 1e-12) {
                    pass = false;
                    detail = "main series decreased";
                }
                if (log_z[i] > log_bound + 1e-9) {
                    pass = false;
                    detail = "main series escaped the bound";
                }
            }
            std::copy(log_z.begin(), log_z.end(), prev.begin());
        };
        solve(mdp, config, observer);
    }
    return {"solver-monotone-bounded", pass, detail};
}

CheckResult check_init_independence(SeededRng& rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 30, 4, 0.85);
        SolverConfig config;
        config.tolerance = 1e-12;
        const SolveReport base = solve(mdp, config);
        for (int init_trial = 0; init_trial < 5; ++init_trial) {
            SolverConfig alt = config;
            alt.init.resize(mdp.n_states());
            for (double& v : alt.init) v = 0.01 + 100.0 * rng.next_double();
            const SolveReport report = solve(mdp, alt);
            for (std::size_t i = 0; i < mdp.n_states(); ++i)
                worst = std::max(worst,
                                 std::abs(report.value.values[i] - base.value.values[i]));
        }
    }
    return {"solver-init-independence", worst <= 1e-6, "max value spread = " + fmt(worst)};
}

CheckResult check_fixed_point(SeededRng& rng) {
    bool pass = true;
    double worst_res = 0.0, lowest_z = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Mdp mdp = random_mdp(rng, 25, 4, 0.9);
        SolverConfig config;
        config.tolerance = 1e-9;
        const SolveReport report = solve(mdp, config);
        worst_res = std::max(worst_res, report.residual);
        for (const double z : report.z) lowest_z = std::min(lowest_z, z);
        if (report.residual > 10.0 * config.tolerance) pass = false;
    }
    if (lowest_z < 1.0 - 1e-9) pass = false;
    return {"solver-fixed-point", pass,
            "max residual = " + fmt(worst_res) + ", min z = " + fmt(lowest_z)};
}

CheckResult check_masking(SeededRng& rng) {
    double worst = -1e300;
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 15, 4, 0.9);
        SolverConfig config;
        config.tolerance = 1e-10;
        const SolveReport base = solve(mdp, config);
        std::vector<std::pair<StateId, ActionId>> forbidden;
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            if (mdp.available_count(s) < 2) continue;
            for (ActionId a = 0; a < mdp.n_actions(); ++a)
                if (mdp.available(s, a) && rng.next_double() < 0.25 &&
                    mdp.available_count(s) > 1) {
                    forbidden.emplace_back(s, a);
                    break;  // drop at most one action per state here
                }
        }
        if (forbidden.empty()) continue;
        const Mdp masked = mask_actions(mdp, forbidden);
        const SolveReport after = solve(masked, config);
        for (std::size_t i = 0; i < mdp.n_states(); ++i)
            worst = std::max(worst, after.value.values[i] - base.value.values[i]);
    }
    return {"solver-masking-monotonicity", worst <= 1e-9, "max value increase = " + fmt(worst)};
}

CheckResult check_closed_forms() {
    bool pass = true;
    std::string detail = "ok";
    for (const double gamma : {0.9, 0.99}) {
        MdpBuilder builder(1, 9, gamma, 1.0, 0.0);
        for (ActionId a = 0; a < 9; ++a) {
            builder.begin_row(0, a);
            builder.add(0, 1.0);
        }
        const Mdp mdp = builder.finish();
        SolverConfig config;
        config.tolerance = 1e-10;
        const SolveReport report = solve(mdp, config);
        const double want = std::log(9.0) / (1.0 - gamma);
        if (std::abs(report.value.values[0] - want) > 1e-6) {
            pass = false;
            detail = "self-loop value off at gamma " + fmt(gamma);
        }
    }
    {
        MdpBuilder builder(2, 2, 0.5, 1.0, 0.0);
        for (StateId s = 0; s < 2; ++s) {
            builder.begin_row(s, 0);
            builder.add(s, 1.0);  // stay
            builder.begin_row(s, 1);
            builder.add(1 - s, 1.0);  // switch
        }
        const Mdp mdp = builder.finish();
        SolverConfig config;
        config.tolerance = 1e-12;
        const SolveReport report = solve(mdp, config);
        if (std::abs(report.value.values[0] - 2.0 * std::log(2.0)) > 1e-8 ||
            std::abs(report.z[0] - 2.0) > 1e-8) {
            pass = false;
            detail = "two-state symmetric value off";
        }
    }
    return {"solver-closed-forms", pass, detail};
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed, const GainFn& gain) {
    std::vector<CheckResult> results;
    {
        SeededRng rng(seed, 1);
        results.push_back(check_path_additivity(rng, gain));
    }
    {
        SeededRng rng(seed, 2);
        results.push_back(check_discounted_equality(rng, gain));
    }
    results.push_back(check_mi_counterexample());
    {
        SeededRng rng(seed, 3);
        results.push_back(check_mi_nonnegative(rng));
    }
    {
        SeededRng rng(seed, 4);
        results.push_back(check_monotone_bounded(rng));
    }
    {
        SeededRng rng(seed, 5);
        results.push_back(check_init_independence(rng));
    }
    {
        SeededRng rng(seed, 6);
        results.push_back(check_fixed_point(rng));
    }
    {
        SeededRng rng(seed, 7);
        results.push_back(check_masking(rng));
    }
    results.push_back(check_closed_forms());
    return results;
}

}  // namespace maxocc
