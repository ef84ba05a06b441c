#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "maxocc/errors.hpp"

namespace maxocc {

/// Time-homogeneous Markov chain over action-states with a positive gain
/// constant. Rows of p are simplex points within 1e-12.
struct PathChain {
    std::size_t n_nodes = 0;
    std::vector<double> p;  // row-major n_nodes x n_nodes
    double k_const = 1.0;

    double at(std::size_t i, std::size_t j) const { return p[i * n_nodes + j]; }
    void validate() const;
    /// Node whose single outgoing transition is a unit self-loop.
    bool is_absorbing(std::size_t i) const { return at(i, i) == 1.0; }
};

/// Two decision steps laid out explicitly: action choice at the start node,
/// a state kernel, per-state action choices and a second state kernel.
struct TwoStepChain {
    std::size_t n_a0 = 0, n_s1 = 0, n_a1 = 0, n_s2 = 0;
    std::vector<double> pi0;  // n_a0
    std::vector<double> p1;   // n_a0 x n_s1
    std::vector<double> pi1;  // n_s1 x n_a1
    std::vector<double> p2;   // n_s1 x n_a1 x n_s2

    double p1_at(std::size_t a0, std::size_t s1) const { return p1[a0 * n_s1 + s1]; }
    double pi1_at(std::size_t s1, std::size_t a1) const { return pi1[s1 * n_a1 + a1]; }
    double p2_at(std::size_t s1, std::size_t a1, std::size_t s2) const {
        return p2[(s1 * n_a1 + a1) * n_s2 + s2];
    }
    void validate() const;
};

/// Random path length distribution p_n = gamma^(n-1)(1-gamma) for n >= 1,
/// truncated where the remaining tail is provably negligible.
struct GeometricHorizon {
    double gamma = 0.0;
    std::size_t truncation = 0;

    /// Pick the truncation length N so that gamma^N * N * k * ln(n_nodes)
    /// drops below 1e-10.
    static GeometricHorizon with_tail_bound(double gamma, std::size_t n_nodes, double k = 1.0);
};

/// Occupancy gain of visiting a transition of probability p: -k ln p.
/// Strictly decreasing in p with gain 0 at p = 1.
double occupancy_gain(double p, double k);

/// Injectable gain function; the default is occupancy_gain. Verification
/// fixtures substitute deliberately broken gains to prove the checks bite.
using GainFn = std::function<double(double p, double k)>;

struct OccupancyPair {
    double global = 0.0;
    double local = 0.0;
};

/// Fixed-length path occupancy from a start node, computed two ways:
/// `global` enumerates every length-n path and applies the gain to the whole
/// path probability; `local` propagates the state distribution and sums
/// expected per-step gains. Enumeration is exhaustive, so chains are capped
/// at 8 nodes and n at 6.
OccupancyPair path_occupancy(const PathChain& chain, std::size_t start, std::size_t n,
                             const GainFn& gain = {});

/// Geometric-length path occupancy. `global` weighs whole-path gains by the
/// length distribution; `local` discounts expected per-step gains. The path
/// enumeration stops extending a path once it sits on an absorbing node or a
/// deterministic tail, which keeps the frontier finite; chains whose alive
/// frontier keeps branching past the budget raise DomainError.
OccupancyPair discounted_occupancy(const PathChain& chain, std::size_t start,
                                   const GeometricHorizon& horizon, const GainFn& gain = {});

/// Mutual information between the action pair and the state pair given the
/// start state, by exhaustive enumeration of the joint distribution.
double mi_global(const TwoStepChain& chain);

/// Sum of the two per-step mutual informations.
double mi_local(const TwoStepChain& chain);

/// The two log-sum terms in which the global and local expressions differ;
/// everything else cancels term by term.
struct MiTerms {
    double global_term = 0.0;
    double local_term = 0.0;
};
MiTerms mi_discriminating_terms(const TwoStepChain& chain);

/// The explicit two-step chain on which the discriminating terms differ by
/// ln 2: one deterministic first action, a fair-coin state split, and an
/// action choice that depends on the realized state.
TwoStepChain counterexample_chain();

}  // namespace maxocc
