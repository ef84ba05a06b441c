#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "maxocc/mdp.hpp"

namespace maxocc {

/// Stopping rule and starting point for the fixed-point iteration. The
/// tolerance applies to the sup-norm change of the value function between
/// sweeps; init (all ones when empty) seeds the z vector.
struct SolverConfig {
    double tolerance = 1e-3;
    std::uint64_t max_iterations = 100000;
    std::vector<double> init;
};

/// Converged solve: optimal values, their exponentiated form
/// z = exp(gamma V / alpha), and convergence diagnostics.
struct SolveReport {
    ValueFunction value;
    std::vector<double> z;
    std::uint64_t iterations = 0;
    double final_delta = 0.0;
    double residual = 0.0;
};

/// Reference action probabilities for the relative-entropy objective. Rows
/// must be simplex points, strictly positive on available actions and zero
/// elsewhere.
struct PriorPolicy {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> rows;

    PriorPolicy() = default;
    PriorPolicy(std::size_t ns, std::size_t na)
        : n_states(ns), n_actions(na), rows(ns * na, 0.0) {}
    double at(StateId s, ActionId a) const { return rows[std::size_t(s) * n_actions + a]; }
    double& at(StateId s, ActionId a) { return rows[std::size_t(s) * n_actions + a]; }
};

/// Uniform prior over the available actions of each state.
PriorPolicy uniform_prior(const Mdp& mdp);

class MaxIterationsExceeded : public Error {
public:
    MaxIterationsExceeded(std::vector<double> last_values, std::uint64_t iterations,
                          double last_delta)
        : Error("no convergence after " + std::to_string(iterations) + " iterations (delta " +
                std::to_string(last_delta) + ")"),
          last_values(std::move(last_values)), iterations(iterations), last_delta(last_delta) {}
    std::vector<double> last_values;
    std::uint64_t iterations;
    double last_delta;
};

/// Observer invoked after every sweep with the current log-z vector.
using IterationObserver = std::function<void(std::uint64_t iteration, std::span<const double> log_z)>;

/// One synchronous application of the iterative map
///   z'_i = (sum_k w_ik exp(H_ik) prod_j z_j^p_ijk)^gamma,
/// evaluated in log space as gamma * logsumexp_k(H_ik + sum_j p_ijk ln z_j).
std::vector<double> z_step(std::span<const double> z, const Mdp& mdp, const EntropyCache& cache);

/// Iterate the map until the value function moves less than the tolerance in
/// sup norm; V = (alpha/gamma) ln z. Throws MaxIterationsExceeded with the
/// last iterate when the cap is hit.
SolveReport solve(const Mdp& mdp, const SolverConfig& config = {},
                  const IterationObserver& observer = {});

/// Same map with the availability coefficients replaced one to one by prior
/// probabilities; solves the relative-entropy objective.
SolveReport solve_kl(const Mdp& mdp, const PriorPolicy& prior, const SolverConfig& config = {},
                     const IterationObserver& observer = {});

/// Specialized iteration for single-successor models: z_i <- (sum over
/// actions of z at the successor)^gamma over the adjacency structure only.
/// Throws NotDeterministic if any available row has two or more successors.
SolveReport solve_deterministic(const Mdp& mdp, const SolverConfig& config = {});

/// Boltzmann policy of a converged value function:
/// pi(a|s) proportional to exp(H_sa + (gamma/alpha) sum_j p(j|s,a) V_j),
/// rows renormalized.
Policy extract_policy(const Mdp& mdp, const ValueFunction& value, const EntropyCache& cache);

/// Policy for the relative-entropy objective; each weight additionally
/// carries the prior probability factor.
Policy extract_policy(const Mdp& mdp, const ValueFunction& value, const EntropyCache& cache,
                      const PriorPolicy& prior);

/// Self-consistency defect sup_i |V_i - alpha ln Z_i(V)|.
double bellman_residual(const Mdp& mdp, const ValueFunction& value, const EntropyCache& cache);

/// Copy of the model with the given (state, action) pairs made unavailable
/// and their transitions dropped. Throws NoActionError if a state would lose
/// its last action.
Mdp mask_actions(const Mdp& mdp, const std::vector<std::pair<StateId, ActionId>>& forbidden);

/// Sup-norm upper bound on optimal values:
/// (alpha ln |A|_max + beta ln |S|) / (1 - gamma).
double value_upper_bound(const Mdp& mdp);

}  // namespace maxocc
