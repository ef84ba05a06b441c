#include "maxocc/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "maxocc/solver.hpp"

namespace maxocc {

namespace {
constexpr double kTieTolerance = 1e-9;

void check_epsilon(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0,1]");
}
}  // namespace

std::vector<double> expected_rewards(const Mdp& mdp, const RewardModel& rewards) {
    if (!rewards.reward) throw DomainError("reward model is empty");
    const std::size_t na = mdp.n_actions();
    std::vector<double> out(mdp.n_states() * na, 0.0);
    for (StateId s = 0; s < mdp.n_states(); ++s)
        for (ActionId a = 0; a < na; ++a) {
            if (!mdp.available(s, a)) continue;
            const TransitionRow row = mdp.row(s, a);
            double sum = 0.0;
            for (std::size_t i = 0; i < row.size(); ++i) {
                const double r = rewards(s, a, row.next[i]);
                if (!std::isfinite(r)) throw DomainError("reward model produced a non-finite value");
                sum += row.prob[i] * r;
            }
            out[std::size_t(s) * na + a] = sum;
        }
    return out;
}

ValueFunction solve_eps_greedy(const Mdp& mdp, const RewardModel& rewards,
                               const EpsilonConfig& config) {
    check_epsilon(config.epsilon);
    if (!(config.tolerance > 0.0)) throw DomainError("tolerance must be positive");
    const std::size_t n = mdp.n_states();
    const std::size_t na = mdp.n_actions();
    const double gamma = mdp.gamma();
    const double eps = config.epsilon;
    const std::vector<double> r_sum = expected_rewards(mdp, rewards);

    std::vector<double> v(n, 0.0), vn(n);
    double delta = std::numeric_limits<double>::infinity();
    std::uint64_t iter = 0;
    while (iter < config.max_iterations) {
        const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
        for (std::int64_t s = 0; s < nn; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            double mean = 0.0;
            std::size_t cnt = 0;
            for (ActionId a = 0; a < na; ++a) {
                if (!mdp.available(static_cast<StateId>(s), a)) continue;
                const TransitionRow row = mdp.row(static_cast<StateId>(s), a);
                double q = r_sum[std::size_t(s) * na + a];
                double exp_v = 0.0;
                for (std::size_t i = 0; i < row.size(); ++i) exp_v += row.prob[i] * v[row.next[i]];
                q += gamma * exp_v;
                best = std::max(best, q);
                mean += q;
                ++cnt;
            }
            vn[s] = (1.0 - eps) * best + eps * mean / static_cast<double>(cnt);
        }
        ++iter;
        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(vn[i] - v[i]));
        v.swap(vn);
        if (delta < config.tolerance) return ValueFunction{std::move(v)};
    }
    throw MaxIterationsExceeded(std::move(v), iter, delta);
}

Policy eps_greedy_policy(const Mdp& mdp, const RewardModel& rewards, const ValueFunction& value,
                         double epsilon) {
    check_epsilon(epsilon);
    if (value.size() != mdp.n_states()) throw DomainError("value size does not match the model");
    const std::size_t na = mdp.n_actions();
    const double gamma = mdp.gamma();
    const std::vector<double> r_sum = expected_rewards(mdp, rewards);
    Policy policy(mdp.n_states(), na);
    std::vector<double> q(na);
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t cnt = 0;
        for (ActionId a = 0; a < na; ++a) {
            if (!mdp.available(s, a)) continue;
            const TransitionRow row = mdp.row(s, a);
            double exp_v = 0.0;
            for (std::size_t i = 0; i < row.size(); ++i) exp_v += row.prob[i] * value.values[row.next[i]];
            q[a] = r_sum[std::size_t(s) * na + a] + gamma * exp_v;
            best = std::max(best, q[a]);
            ++cnt;
        }
        std::size_t ties = 0;
        for (ActionId a = 0; a < na; ++a)
            if (mdp.available(s, a) && q[a] >= best - kTieTolerance) ++ties;
        const double base = epsilon / static_cast<double>(cnt);
        const double greedy_share = (1.0 - epsilon) / static_cast<double>(ties);
        for (ActionId a = 0; a < na; ++a) {
            if (!mdp.available(s, a)) continue;
            policy.at(s, a) = base + (q[a] >= best - kTieTolerance ? greedy_share : 0.0);
        }
    }
    return policy;
}

namespace {
ValueFunction linear_policy_evaluation(const Mdp& mdp, const Policy& policy,
                                       const std::vector<double>& r_pi) {
    const std::size_t n = mdp.n_states();
    if (n > 4096) throw DomainError("dense policy evaluation supports up to 4096 states");
    const std::vector<double> m = policy_transition_matrix(mdp, policy);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) -= mdp.gamma() * m[i * n + j];
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) b(i) = r_pi[i];
    const Eigen::VectorXd x = a.partialPivLu().solve(b);
    ValueFunction out;
    out.values.assign(x.data(), x.data() + n);
    return out;
}
}  // namespace

ValueFunction evaluate_policy_entropy(const Mdp& mdp, const Policy& policy) {
    validate_policy(mdp, policy);
    const std::size_t n = mdp.n_states();
    std::vector<double> r_pi(n, 0.0);
    for (StateId s = 0; s < n; ++s) {
        r_pi[s] = mdp.alpha() * discrete_entropy(policy.row(s));
        if (mdp.beta() != 0.0)
            for (ActionId a = 0; a < mdp.n_actions(); ++a) {
                const double pa = policy.at(s, a);
                if (pa > 0.0) r_pi[s] += mdp.beta() * pa * discrete_entropy(mdp.row(s, a).prob);
            }
    }
    return linear_policy_evaluation(mdp, policy, r_pi);
}

ValueFunction evaluate_policy_reward(const Mdp& mdp, const Policy& policy,
                                     const RewardModel& rewards) {
    validate_policy(mdp, policy);
    const std::vector<double> r_sum = expected_rewards(mdp, rewards);
    const std::size_t n = mdp.n_states();
    std::vector<double> r_pi(n, 0.0);
    for (StateId s = 0; s < n; ++s)
        for (ActionId a = 0; a < mdp.n_actions(); ++a)
            r_pi[s] += policy.at(s, a) * r_sum[std::size_t(s) * mdp.n_actions() + a];
    return linear_policy_evaluation(mdp, policy, r_pi);
}

}  // namespace maxocc
