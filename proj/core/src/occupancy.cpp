#include "maxocc/occupancy.hpp"

#include <cmath>

namespace maxocc {

namespace {
constexpr double kSimplexTol = 1e-12;
constexpr std::size_t kMaxEnumNodes = 8;
constexpr std::size_t kMaxEnumLength = 6;
constexpr std::uint64_t kEnumBudget = 20'000'000;

void check_simplex(const double* p, std::size_t n, const char* what) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] < 0.0) throw DomainError(std::string(what) + ": negative probability");
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > kSimplexTol)
        throw DomainError(std::string(what) + ": row mass " + std::to_string(sum));
}
}  // namespace

void PathChain::validate() const {
    if (n_nodes == 0 || p.size() != n_nodes * n_nodes) throw DomainError("chain shape mismatch");
    if (!(k_const > 0.0)) throw DomainError("gain constant must be positive");
    for (std::size_t i = 0; i < n_nodes; ++i) check_simplex(p.data() + i * n_nodes, n_nodes, "chain row");
}

void TwoStepChain::validate() const {
    if (pi0.size() != n_a0 || p1.size() != n_a0 * n_s1 || pi1.size() != n_s1 * n_a1 ||
        p2.size() != n_s1 * n_a1 * n_s2)
        throw DomainError("two-step chain shape mismatch");
    check_simplex(pi0.data(), n_a0, "pi0");
    for (std::size_t a = 0; a < n_a0; ++a) check_simplex(p1.data() + a * n_s1, n_s1, "p1");
    for (std::size_t s = 0; s < n_s1; ++s) check_simplex(pi1.data() + s * n_a1, n_a1, "pi1");
    for (std::size_t r = 0; r < n_s1 * n_a1; ++r) check_simplex(p2.data() + r * n_s2, n_s2, "p2");
}

double occupancy_gain(double p, double k) {
    if (!(k > 0.0)) throw DomainError("gain constant must be positive");
    if (!(p > 0.0) || p > 1.0) throw DomainError("occupancy gain needs p in (0,1]");
    return -k * std::log(p);
}

GeometricHorizon GeometricHorizon::with_tail_bound(double gamma, std::size_t n_nodes, double k) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    const double lognodes = std::log(static_cast<double>(n_nodes < 2 ? 2 : n_nodes));
    std::size_t n = 1;
    while (std::pow(gamma, static_cast<double>(n)) * static_cast<double>(n) * k * lognodes >=
           1e-10) {
        if (++n > 10'000'000) throw DomainError("tail bound requires an impractical horizon");
    }
    return {gamma, n};
}

namespace {

struct EnumAccum {
    std::vector<double> visit;     // sum of P*gain(P) over alive length-d prefixes
    std::vector<double> absorbed;  // same for paths first hitting an absorbing node at depth d
    std::uint64_t budget = kEnumBudget;
};

// Depth-first walk over all paths from `node`, applying `gain` to whole-path
// probabilities. Descent stops at absorbing nodes; their extensions keep the
// same probability forever.
void enumerate_paths(const PathChain& chain, const GainFn& gain, std::size_t node, double prob,
                     std::size_t depth, std::size_t max_depth, EnumAccum& acc) {
    if (depth > 0) {
        const double g = prob * gain(prob, chain.k_const);
        if (chain.is_absorbing(node)) {
            acc.absorbed[depth] += g;
            return;
        }
        acc.visit[depth] += g;
        if (depth == max_depth) return;
    }
    for (std::size_t j = 0; j < chain.n_nodes; ++j) {
        const double pij = chain.at(node, j);
        if (pij <= 0.0) continue;
        if (acc.budget-- == 0) throw DomainError("path enumeration budget exceeded");
        enumerate_paths(chain, gain, j, prob * pij, depth + 1, max_depth, acc);
    }
}

// Expected per-step gains e_t for t = 1..n via state-distribution
// propagation; no whole-path products involved.
std::vector<double> per_step_gains(const PathChain& chain, const GainFn& gain, std::size_t start,
                                   std::size_t n) {
    const std::size_t m = chain.n_nodes;
    std::vector<double> node_gain(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double pij = chain.at(i, j);
            if (pij > 0.0) node_gain[i] += pij * gain(pij, chain.k_const);
        }
    std::vector<double> q(m, 0.0), qn(m, 0.0);
    q[start] = 1.0;
    std::vector<double> e(n + 1, 0.0);
    for (std::size_t t = 1; t <= n; ++t) {
        for (std::size_t i = 0; i < m; ++i) e[t] += q[i] * node_gain[i];
        if (t == n) break;
        std::fill(qn.begin(), qn.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (q[i] == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) qn[j] += q[i] * chain.at(i, j);
        }
        std::swap(q, qn);
    }
    return e;
}

GainFn resolve(const GainFn& gain) {
    if (gain) return gain;
    return [](double p, double k) { return occupancy_gain(p, k); };
}

}  // namespace

OccupancyPair path_occupancy(const PathChain& chain, std::size_t start, std::size_t n,
                             const GainFn& gain_in) {
    chain.validate();
    if (start >= chain.n_nodes) throw DomainError("start node out of range");
    if (n < 1) throw DomainError("path length must be at least 1");
    if (chain.n_nodes > kMaxEnumNodes || n > kMaxEnumLength)
        throw DomainError("exhaustive enumeration capped at 8 nodes and length 6");
    const GainFn gain = resolve(gain_in);

    EnumAccum acc;
    acc.visit.assign(n + 1, 0.0);
    acc.absorbed.assign(n + 1, 0.0);
    enumerate_paths(chain, gain, start, 1.0, 0, n, acc);
    double absorbed_before = 0.0;
    for (std::size_t d = 1; d <= n; ++d) absorbed_before += acc.absorbed[d];
    const double global = acc.visit[n] + absorbed_before;

    const std::vector<double> e = per_step_gains(chain, gain, start, n);
    double local = 0.0;
    for (std::size_t t = 1; t <= n; ++t) local += e[t];
    return {global, local};
}

OccupancyPair discounted_occupancy(const PathChain& chain, std::size_t start,
                                   const GeometricHorizon& horizon, const GainFn& gain_in) {
    chain.validate();
    if (start >= chain.n_nodes) throw DomainError("start node out of range");
    if (!(horizon.gamma > 0.0 && horizon.gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    if (horizon.truncation < 1) throw DomainError("truncation must be at least 1");
    const GainFn gain = resolve(gain_in);
    const double gamma = horizon.gamma;
    const std::size_t n = horizon.truncation;

    EnumAccum acc;
    acc.visit.assign(n + 1, 0.0);
    acc.absorbed.assign(n + 1, 0.0);
    enumerate_paths(chain, gain, start, 1.0, 0, n, acc);

    // G_d = alive length-d prefixes + every path absorbed at depth <= d.
    // The series tail treats G as constant past the truncation, which is
    // exact once all mass is absorbed or moving deterministically.
    double global = 0.0;
    double absorbed_cum = 0.0;
    double weight = 1.0 - gamma;  // gamma^(d-1) * (1-gamma)
    double g_last = 0.0;
    for (std::size_t d = 1; d <= n; ++d) {
        absorbed_cum += acc.absorbed[d];
        g_last = acc.visit[d] + absorbed_cum;
        global += weight * g_last;
        weight *= gamma;
    }
    global += std::pow(gamma, static_cast<double>(n)) * g_last;

    const std::vector<double> e = per_step_gains(chain, gain, start, n);
    double local = 0.0;
    double dw = 1.0;  // gamma^(t-1)
    for (std::size_t t = 1; t <= n; ++t) {
        local += dw * e[t];
        dw *= gamma;
    }
    return {global, local};
}

namespace {
// Joint distribution over (a0, s1, a1, s2); zero-probability cells skipped.
template <typename F>
void for_each_joint(const TwoStepChain& c, F&& f) {
    for (std::size_t a0 = 0; a0 < c.n_a0; ++a0) {
        if (c.pi0[a0] == 0.0) continue;
        for (std::size_t s1 = 0; s1 < c.n_s1; ++s1) {
            const double p01 = c.pi0[a0] * c.p1_at(a0, s1);
            if (p01 == 0.0) continue;
            for (std::size_t a1 = 0; a1 < c.n_a1; ++a1) {
                const double p011 = p01 * c.pi1_at(s1, a1);
                if (p011 == 0.0) continue;
                for (std::size_t s2 = 0; s2 < c.n_s2; ++s2) {
                    const double pj = p011 * c.p2_at(s1, a1, s2);
                    if (pj > 0.0) f(a0, s1, a1, s2, pj);
                }
            }
        }
    }
}
}  // namespace

double mi_global(const TwoStepChain& chain) {
    chain.validate();
    std::vector<double> p_actions(chain.n_a0 * chain.n_a1, 0.0);
    std::vector<double> p_states(chain.n_s1 * chain.n_s2, 0.0);
    for_each_joint(chain, [&](std::size_t a0, std::size_t s1, std::size_t a1, std::size_t s2,
                              double pj) {
        p_actions[a0 * chain.n_a1 + a1] += pj;
        p_states[s1 * chain.n_s2 + s2] += pj;
    });
    double mi = 0.0;
    for_each_joint(chain, [&](std::size_t a0, std::size_t s1, std::size_t a1, std::size_t s2,
                              double pj) {
        mi += pj * std::log(pj / (p_actions[a0 * chain.n_a1 + a1] * p_states[s1 * chain.n_s2 + s2]));
    });
    return mi;
}

double mi_local(const TwoStepChain& chain) {
    chain.validate();
    // step 1: MI between a0 and s1
    std::vector<double> p_s1(chain.n_s1, 0.0);
    for (std::size_t a0 = 0; a0 < chain.n_a0; ++a0)
        for (std::size_t s1 = 0; s1 < chain.n_s1; ++s1) p_s1[s1] += chain.pi0[a0] * chain.p1_at(a0, s1);
    double mi1 = 0.0;
    for (std::size_t a0 = 0; a0 < chain.n_a0; ++a0)
        for (std::size_t s1 = 0; s1 < chain.n_s1; ++s1) {
            const double pj = chain.pi0[a0] * chain.p1_at(a0, s1);
            if (pj > 0.0) mi1 += pj * std::log(pj / (chain.pi0[a0] * p_s1[s1]));
        }
    // step 2: expected MI between a1 and s2 given the realized s1
    double mi2 = 0.0;
    for (std::size_t s1 = 0; s1 < chain.n_s1; ++s1) {
        if (p_s1[s1] == 0.0) continue;
        std::vector<double> p_s2(chain.n_s2, 0.0);
        for (std::size_t a1 = 0; a1 < chain.n_a1; ++a1)
            for (std::size_t s2 = 0; s2 < chain.n_s2; ++s2)
                p_s2[s2] += chain.pi1_at(s1, a1) * chain.p2_at(s1, a1, s2);
        double mi_s = 0.0;
        for (std::size_t a1 = 0; a1 < chain.n_a1; ++a1) {
            const double pa = chain.pi1_at(s1, a1);
            if (pa == 0.0) continue;
            for (std::size_t s2 = 0; s2 < chain.n_s2; ++s2) {
                const double pj = pa * chain.p2_at(s1, a1, s2);
                if (pj > 0.0) mi_s += pj * std::log(pj / (pa * p_s2[s2]));
            }
        }
        mi2 += p_s1[s1] * mi_s;
    }
    return mi1 + mi2;
}

MiTerms mi_discriminating_terms(const TwoStepChain& chain) {
    chain.validate();
    // mixture marginal of a1 given a0, marginalizing the intermediate state
    std::vector<double> mix(chain.n_a0 * chain.n_a1, 0.0);
    for (std::size_t a0 = 0; a0 < chain.n_a0; ++a0)
        for (std::size_t s = 0; s < chain.n_s1; ++s)
            for (std::size_t a1 = 0; a1 < chain.n_a1; ++a1)
                mix[a0 * chain.n_a1 + a1] += chain.pi1_at(s, a1) * chain.p1_at(a0, s);
    MiTerms terms;
    for_each_joint(chain, [&](std::size_t a0, std::size_t s1, std::size_t a1, std::size_t,
                              double pj) {
        terms.global_term += pj * std::log(mix[a0 * chain.n_a1 + a1]);
        terms.local_term += pj * std::log(chain.pi1_at(s1, a1));
    });
    return terms;
}

TwoStepChain counterexample_chain() {
    TwoStepChain c;
    c.n_a0 = 1;
    c.n_s1 = 2;
    c.n_a1 = 3;
    c.n_s2 = 3;
    c.pi0 = {1.0};
    c.p1 = {0.5, 0.5};
    c.pi1 = {0.5, 0.5, 0.0,   // from the first state: two equiprobable actions
             0.0, 0.0, 1.0};  // from the second: one deterministic action
    c.p2.assign(c.n_s1 * c.n_a1 * c.n_s2, 0.0);
    for (std::size_t s1 = 0; s1 < c.n_s1; ++s1)
        for (std::size_t a1 = 0; a1 < c.n_a1; ++a1)
            c.p2[(s1 * c.n_a1 + a1) * c.n_s2 + a1] = 1.0;  // second step reveals the action
    c.validate();
    return c;
}

}  // namespace maxocc
