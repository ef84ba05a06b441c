#pragma once

#include <cstdint>
#include <functional>

#include "maxocc/mdp.hpp"

namespace maxocc {

/// Reward per (state, action, successor) triple, evaluated lazily. Entries
/// must be finite; absorbing dead states must carry zero.
struct RewardModel {
    std::function<double(StateId s, ActionId a, StateId next)> reward;
    double operator()(StateId s, ActionId a, StateId next) const { return reward(s, a, next); }
};

/// Exploration level and stopping rule for the reward-seeking baseline.
struct EpsilonConfig {
    double epsilon = 0.0;
    double tolerance = 1e-3;
    std::uint64_t max_iterations = 100000;
};

/// Fixed point of the epsilon-soft optimality equation
///   V(s) = (1-eps) max_a Q(s,a) + (eps/|A(s)|) sum_a Q(s,a),
///   Q(s,a) = sum_s' p(s'|s,a) (r + gamma V(s')),
/// via synchronous value iteration to sup-norm tolerance.
ValueFunction solve_eps_greedy(const Mdp& mdp, const RewardModel& rewards,
                               const EpsilonConfig& config);

/// Greedy-with-exploration policy for a solved value function: mass
/// 1 - eps + eps/|A(s)| on the lookahead argmax, eps/|A(s)| elsewhere.
/// Actions within 1e-9 of the maximum share the greedy mass equally.
Policy eps_greedy_policy(const Mdp& mdp, const RewardModel& rewards, const ValueFunction& value,
                         double epsilon);

/// Expected one-step reward sum_s' p(s'|s,a) r(s,a,s') for every available
/// row, indexed s * n_actions + a.
std::vector<double> expected_rewards(const Mdp& mdp, const RewardModel& rewards);

/// Exact policy evaluation of the entropy objective by a dense linear solve
/// of the recursion V = r_pi + gamma M_pi V with
/// r_pi(s) = alpha H(pi(.|s)) + beta sum_a pi(a|s) H(S'|s,a).
/// Independent of the fixed-point solver; dense, so small models only.
ValueFunction evaluate_policy_entropy(const Mdp& mdp, const Policy& policy);

/// Exact policy evaluation of an external reward objective by the same dense
/// linear solve with r_pi(s) = sum_a pi(a|s) sum_s' p r(s,a,s').
ValueFunction evaluate_policy_reward(const Mdp& mdp, const Policy& policy,
                                     const RewardModel& rewards);

}  // namespace maxocc
