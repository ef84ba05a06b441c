#include "maxocc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>

namespace maxocc {

namespace {

// One synchronous sweep in log space. log_w, when given, holds ln of the
// per-row weights (the prior probabilities); otherwise available actions
// carry weight one. Reduction order per state is fixed (action index, then
// stored entry order), so results do not depend on how states are split
// across threads.
void sweep(const Mdp& mdp, const EntropyCache& cache, const double* log_w, const double* x,
           double* out) {
    const auto n = static_cast<std::int64_t>(mdp.n_states());
    const std::size_t na = mdp.n_actions();
    const double gamma = mdp.gamma();
#pragma omp parallel
    {
        std::vector<double> terms(na);
#pragma omp for schedule(static)
        for (std::int64_t s = 0; s < n; ++s) {
            std::size_t cnt = 0;
            double hi = -std::numeric_limits<double>::infinity();
            for (ActionId a = 0; a < na; ++a) {
                if (!mdp.available(static_cast<StateId>(s), a)) continue;
                double t = cache.at(static_cast<StateId>(s), a);
                if (log_w) t += log_w[std::size_t(s) * na + a];
                const TransitionRow row = mdp.row(static_cast<StateId>(s), a);
                for (std::size_t i = 0; i < row.size(); ++i) t += row.prob[i] * x[row.next[i]];
                terms[cnt++] = t;
                hi = std::max(hi, t);
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < cnt; ++i) sum += std::exp(terms[i] - hi);
            out[s] = gamma * (hi + std::log(sum));
        }
    }
}

// Specialized sweep for single-successor rows; touches only the adjacency.
void sweep_deterministic(const Mdp& mdp, const std::vector<StateId>& succ,
                         const std::vector<std::uint8_t>& has, const double* x, double* out) {
    const auto n = static_cast<std::int64_t>(mdp.n_states());
    const std::size_t na = mdp.n_actions();
    const double gamma = mdp.gamma();
#pragma omp parallel
    {
        std::vector<double> terms(na);
#pragma omp for schedule(static)
        for (std::int64_t s = 0; s < n; ++s) {
            std::size_t cnt = 0;
            double hi = -std::numeric_limits<double>::infinity();
            for (ActionId a = 0; a < na; ++a) {
                const std::size_t r = std::size_t(s) * na + a;
                if (!has[r]) continue;
                const double t = x[succ[r]];
                terms[cnt++] = t;
                hi = std::max(hi, t);
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < cnt; ++i) sum += std::exp(terms[i] - hi);
            out[s] = gamma * (hi + std::log(sum));
        }
    }
}

std::vector<double> initial_log_z(const Mdp& mdp, const SolverConfig& config) {
    const std::size_t n = mdp.n_states();
    std::vector<double> x(n, 0.0);
    if (!config.init.empty()) {
        if (config.init.size() != n) throw DomainError("init size does not match the state count");
        for (std::size_t i = 0; i < n; ++i) {
            if (!(config.init[i] > 0.0)) throw NonPositiveInput("init must be strictly positive");
            x[i] = std::log(config.init[i]);
        }
    }
    return x;
}

template <typename SweepFn>
SolveReport iterate_to_fixed_point(const Mdp& mdp, const SolverConfig& config,
                                   const IterationObserver& observer, SweepFn&& do_sweep) {
    if (!(config.tolerance > 0.0)) throw DomainError("tolerance must be positive");
    const std::size_t n = mdp.n_states();
    const double v_scale = mdp.alpha() / mdp.gamma();

    std::vector<double> x = initial_log_z(mdp, config);
    std::vector<double> xn(n);
    double delta = std::numeric_limits<double>::infinity();
    std::uint64_t iter = 0;
    bool converged = false;
    while (iter < config.max_iterations) {
        do_sweep(x.data(), xn.data());
        ++iter;
        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(xn[i] - x[i]));
        delta *= v_scale;
        x.swap(xn);
        if (observer) observer(iter, std::span<const double>(x.data(), n));
        if (delta < config.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = v_scale * x[i];
        throw MaxIterationsExceeded(std::move(v), iter, delta);
    }

    SolveReport report;
    report.iterations = iter;
    report.final_delta = delta;
    report.value.values.resize(n);
    report.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        report.value.values[i] = v_scale * x[i];
        report.z[i] = std::exp(x[i]);
    }
    // one extra sweep measures the self-consistency defect of the fixed point
    do_sweep(x.data(), xn.data());
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(xn[i] - x[i]));
    report.residual = res * v_scale;
    return report;
}

std::vector<double> log_prior_weights(const Mdp& mdp, const PriorPolicy& prior) {
    if (prior.n_states != mdp.n_states() || prior.n_actions != mdp.n_actions())
        throw DomainError("prior shape does not match the model");
    std::vector<double> lw(prior.rows.size(), 0.0);
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        double sum = 0.0;
        for (ActionId a = 0; a < mdp.n_actions(); ++a) {
            const double w = prior.at(s, a);
            if (mdp.available(s, a)) {
                if (!(w > 0.0))
                    throw NonPositiveInput("prior must be strictly positive on available actions");
                lw[std::size_t(s) * mdp.n_actions() + a] = std::log(w);
            } else if (w != 0.0) {
                throw UnavailableAction(s, a);
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw NotADistribution(sum);
    }
    return lw;
}

}  // namespace

PriorPolicy uniform_prior(const Mdp& mdp) {
    PriorPolicy prior(mdp.n_states(), mdp.n_actions());
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        const double w = 1.0 / static_cast<double>(mdp.available_count(s));
        for (ActionId a = 0; a < mdp.n_actions(); ++a)
            if (mdp.available(s, a)) prior.at(s, a) = w;
    }
    return prior;
}

std::vector<double> z_step(std::span<const double> z, const Mdp& mdp, const EntropyCache& cache) {
    if (z.size() != mdp.n_states()) throw DomainError("z size does not match the state count");
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0.0)) throw NonPositiveInput("z must be strictly positive");
        x[i] = std::log(z[i]);
    }
    std::vector<double> xn(z.size());
    sweep(mdp, cache, nullptr, x.data(), xn.data());
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::exp(xn[i]);
    return out;
}

SolveReport solve(const Mdp& mdp, const SolverConfig& config, const IterationObserver& observer) {
    const EntropyCache cache = build_entropy_cache(mdp);
    return iterate_to_fixed_point(mdp, config, observer, [&](const double* x, double* out) {
        sweep(mdp, cache, nullptr, x, out);
    });
}

SolveReport solve_kl(const Mdp& mdp, const PriorPolicy& prior, const SolverConfig& config,
                     const IterationObserver& observer) {
    const EntropyCache cache = build_entropy_cache(mdp);
    const std::vector<double> lw = log_prior_weights(mdp, prior);
    return iterate_to_fixed_point(mdp, config, observer, [&](const double* x, double* out) {
        sweep(mdp, cache, lw.data(), x, out);
    });
}

SolveReport solve_deterministic(const Mdp& mdp, const SolverConfig& config) {
    const std::size_t na = mdp.n_actions();
    std::vector<StateId> succ(mdp.n_states() * na, 0);
    std::vector<std::uint8_t> has(mdp.n_states() * na, 0);
    for (StateId s = 0; s < mdp.n_states(); ++s)
        for (ActionId a = 0; a < na; ++a) {
            if (!mdp.available(s, a)) continue;
            const TransitionRow row = mdp.row(s, a);
            if (row.size() != 1) throw NotDeterministic(s, a);
            succ[std::size_t(s) * na + a] = row.next[0];
            has[std::size_t(s) * na + a] = 1;
        }
    return iterate_to_fixed_point(mdp, config, {}, [&](const double* x, double* out) {
        sweep_deterministic(mdp, succ, has, x, out);
    });
}

namespace {
Policy policy_from_terms(const Mdp& mdp, const ValueFunction& value, const EntropyCache& cache,
                         const std::vector<double>* lw) {
    if (value.size() != mdp.n_states()) throw DomainError("value size does not match the model");
    const std::size_t na = mdp.n_actions();
    const double x_scale = mdp.gamma() / mdp.alpha();
    Policy policy(mdp.n_states(), na);
    std::vector<double> x(mdp.n_states());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x_scale * value.values[i];
    std::vector<double> terms(na);
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        double hi = -std::numeric_limits<double>::infinity();
        for (ActionId a = 0; a < na; ++a) {
            if (!mdp.available(s, a)) continue;
            double t = cache.at(s, a);
            if (lw) t += (*lw)[std::size_t(s) * na + a];
            const TransitionRow row = mdp.row(s, a);
            for (std::size_t i = 0; i < row.size(); ++i) t += row.prob[i] * x[row.next[i]];
            terms[a] = t;
            hi = std::max(hi, t);
        }
        double sum = 0.0;
        for (ActionId a = 0; a < na; ++a)
            if (mdp.available(s, a)) sum += std::exp(terms[a] - hi);
        for (ActionId a = 0; a < na; ++a)
            if (mdp.available(s, a)) policy.at(s, a) = std::exp(terms[a] - hi) / sum;
    }
    return policy;
}
}  // namespace

Policy extract_policy(const Mdp& mdp, const ValueFunction& value, const EntropyCache& cache) {
    return policy_from_terms(mdp, value, cache, nullptr);
}

Policy extract_policy(const Mdp& mdp, const ValueFunction& value, const EntropyCache& cache,
                      const PriorPolicy& prior) {
    const std::vector<double> lw = log_prior_weights(mdp, prior);
    return policy_from_terms(mdp, value, cache, &lw);
}

double bellman_residual(const Mdp& mdp, const ValueFunction& value, const EntropyCache& cache) {
    if (value.size() != mdp.n_states()) throw DomainError("value size does not match the model");
    const double x_scale = mdp.gamma() / mdp.alpha();
    std::vector<double> x(mdp.n_states());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x_scale * value.values[i];
    std::vector<double> xn(x.size());
    sweep(mdp, cache, nullptr, x.data(), xn.data());
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        res = std::max(res, std::abs(xn[i] - x[i]) / x_scale);
    return res;
}

Mdp mask_actions(const Mdp& mdp, const std::vector<std::pair<StateId, ActionId>>& forbidden) {
    std::unordered_set<std::uint64_t> drop;
    for (const auto& [s, a] : forbidden)
        drop.insert(std::uint64_t(s) * mdp.n_actions() + a);
    MdpBuilder builder(mdp.n_states(), mdp.n_actions(), mdp.gamma(), mdp.alpha(), mdp.beta());
    builder.reserve(mdp.n_entries());
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        bool any = false;
        for (ActionId a = 0; a < mdp.n_actions(); ++a) {
            if (!mdp.available(s, a)) continue;
            if (drop.count(std::uint64_t(s) * mdp.n_actions() + a)) continue;
            any = true;
            builder.begin_row(s, a);
            const TransitionRow row = mdp.row(s, a);
            for (std::size_t i = 0; i < row.size(); ++i) builder.add(row.next[i], row.prob[i]);
        }
        if (!any) throw NoActionError(s);
    }
    return builder.finish(false);
}

double value_upper_bound(const Mdp& mdp) {
    std::size_t a_max = 0;
    for (StateId s = 0; s < mdp.n_states(); ++s) a_max = std::max(a_max, mdp.available_count(s));
    return (mdp.alpha() * std::log(static_cast<double>(a_max)) +
            mdp.beta() * std::log(static_cast<double>(mdp.n_states()))) /
           (1.0 - mdp.gamma());
}

}  // namespace maxocc
