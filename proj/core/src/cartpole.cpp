#include "maxocc/envs/cartpole.hpp"

#include <algorithm>
#include <cmath>

namespace maxocc {

namespace {

void check_config(const CartpoleConfig& cfg) {
    if (cfg.grid < 2 || cfg.grid % 2 == 0) throw DomainError("grid must be odd and at least 3");
    if (!(cfg.x_bound > 0 && cfg.theta_bound > 0 && cfg.v_bound > 0 && cfg.omega_bound > 0))
        throw DomainError("bounds must be positive");
    if (!(cfg.dt > 0)) throw DomainError("dt must be positive");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    if (cfg.forces.empty()) throw DomainError("force set must not be empty");
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

struct DimWeight {
    int idx;
    double frac;  // weight frac on idx+1, (1-frac) on idx
};

DimWeight locate(double value, double bound, int grid) {
    const double h = 2.0 * bound / static_cast<double>(grid - 1);
    double t = (value + bound) / h;
    int i = static_cast<int>(std::floor(t));
    if (i < 0) i = 0;
    if (i > grid - 2) i = grid - 2;
    double f = t - static_cast<double>(i);
    if (f < 0.0) f = 0.0;
    if (f > 1.0) f = 1.0;
    return {i, f};
}

ActionId nothing_action(const CartpoleConfig& cfg) {
    for (std::size_t i = 0; i < cfg.forces.size(); ++i)
        if (cfg.forces[i] == 0.0) return static_cast<ActionId>(i);
    return 0;
}

}  // namespace

Accelerations cartpole_derivatives(const ContinuousState& state, double force,
                                   const CartpoleConfig& config) {
    const double M = config.cart_mass, m = config.pole_mass, l = config.pole_length;
    const double g = config.gravity;
    const double sin_t = std::sin(state.theta), cos_t = std::cos(state.theta);
    const double theta_ddot =
        (-g * sin_t + cos_t / (M + m) * (-force + m * state.omega * state.omega * l * sin_t)) /
        (l * (4.0 / 3.0 - m * cos_t * cos_t / (M + m)));
    double x_ddot;
    if (config.standard_x_accel)
        x_ddot = (force + m * l * (state.omega * state.omega * sin_t - theta_ddot * cos_t)) / (M + m);
    else
        x_ddot = (4.0 / 3.0 * l * theta_ddot - g * sin_t) / cos_t;
    return {theta_ddot, x_ddot};
}

ContinuousState cartpole_step(const ContinuousState& state, double force, double dt,
                              const CartpoleConfig& config) {
    if (!state.alive) return state;
    const Accelerations acc = cartpole_derivatives(state, force, config);
    ContinuousState next;
    next.x = state.x + dt * state.v;
    next.v = state.v + dt * acc.x_ddot;
    next.theta = state.theta + dt * state.omega;
    next.omega = state.omega + dt * acc.theta_ddot;
    next.alive =
        std::abs(next.x) < config.x_bound && std::abs(next.theta) < config.theta_bound;
    return next;
}

ContinuousState CartpoleModel::vertex_state(StateId s) const {
    const int g = config.grid;
    ContinuousState out;
    out.omega = axis_omega[s % g];
    s /= g;
    out.theta = axis_theta[s % g];
    s /= g;
    out.v = axis_v[s % g];
    s /= g;
    out.x = axis_x[s % g];
    return out;
}

double CartpoleModel::interpolate(const std::vector<double>& values,
                                  const ContinuousState& s) const {
    const int g = config.grid;
    const DimWeight wx = locate(s.x, config.x_bound, g);
    const DimWeight wv = locate(std::clamp(s.v, -config.v_bound, config.v_bound), config.v_bound, g);
    const DimWeight wt = locate(s.theta, config.theta_bound, g);
    const DimWeight wo =
        locate(std::clamp(s.omega, -config.omega_bound, config.omega_bound), config.omega_bound, g);
    double acc = 0.0;
    for (int bx = 0; bx < 2; ++bx)
        for (int bv = 0; bv < 2; ++bv)
            for (int bt = 0; bt < 2; ++bt)
                for (int bo = 0; bo < 2; ++bo) {
                    const double w = (bx ? wx.frac : 1.0 - wx.frac) * (bv ? wv.frac : 1.0 - wv.frac) *
                                     (bt ? wt.frac : 1.0 - wt.frac) * (bo ? wo.frac : 1.0 - wo.frac);
                    if (w == 0.0) continue;
                    acc += w * values[vertex_of(wx.idx + bx, wv.idx + bv, wt.idx + bt, wo.idx + bo)];
                }
    return acc;
}

CartpoleModel build_cartpole(const CartpoleConfig& config, double alpha, double beta) {
    check_config(config);
    CartpoleModel model;
    model.config = config;
    const int g = config.grid;
    model.axis_x = linspace(-config.x_bound, config.x_bound, g);
    model.axis_v = linspace(-config.v_bound, config.v_bound, g);
    model.axis_theta = linspace(-config.theta_bound, config.theta_bound, g);
    model.axis_omega = linspace(-config.omega_bound, config.omega_bound, g);
    const std::size_t n_alive = model.n_alive();
    model.dead_state = static_cast<StateId>(n_alive);
    const std::size_t n_actions = config.forces.size();

    MdpBuilder builder(n_alive + 1, n_actions, config.gamma, alpha, beta);
    builder.reserve((n_alive + 1) * n_actions * 12);
    ContinuousState from;
    for (std::size_t s = 0; s < n_alive; ++s) {
        from = model.vertex_state(static_cast<StateId>(s));
        for (std::size_t a = 0; a < n_actions; ++a) {
            builder.begin_row(static_cast<StateId>(s), static_cast<ActionId>(a));
            const ContinuousState landing = cartpole_step(from, config.forces[a], config.dt, config);
            if (!landing.alive) {
                builder.add(model.dead_state, 1.0);
                continue;
            }
            const DimWeight wx = locate(landing.x, config.x_bound, g);
            const DimWeight wv =
                locate(std::clamp(landing.v, -config.v_bound, config.v_bound), config.v_bound, g);
            const DimWeight wt = locate(landing.theta, config.theta_bound, g);
            const DimWeight wo = locate(
                std::clamp(landing.omega, -config.omega_bound, config.omega_bound),
                config.omega_bound, g);
            for (int bx = 0; bx < 2; ++bx)
                for (int bv = 0; bv < 2; ++bv)
                    for (int bt = 0; bt < 2; ++bt)
                        for (int bo = 0; bo < 2; ++bo) {
                            const double w = (bx ? wx.frac : 1.0 - wx.frac) *
                                             (bv ? wv.frac : 1.0 - wv.frac) *
                                             (bt ? wt.frac : 1.0 - wt.frac) *
                                             (bo ? wo.frac : 1.0 - wo.frac);
                            if (w == 0.0) continue;
                            builder.add(
                                model.vertex_of(wx.idx + bx, wv.idx + bv, wt.idx + bt, wo.idx + bo),
                                w);
                        }
        }
    }
    builder.begin_row(model.dead_state, nothing_action(config));
    builder.add(model.dead_state, 1.0);
    model.mdp = builder.finish();
    return model;
}

std::vector<double> cartpole_runtime_policy(const CartpoleModel& model, const ValueFunction& value,
                                            const ContinuousState& state) {
    if (value.size() != model.mdp.n_states()) throw DomainError("value size does not match the model");
    const CartpoleConfig& cfg = model.config;
    const double scale = cfg.gamma / model.mdp.alpha();
    std::vector<double> terms(cfg.forces.size());
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cfg.forces.size(); ++a) {
        const ContinuousState landing = cartpole_step(state, cfg.forces[a], cfg.dt, cfg);
        const double v = landing.alive ? model.interpolate(value.values, landing) : 0.0;
        terms[a] = scale * v;
        hi = std::max(hi, terms[a]);
    }
    double sum = 0.0;
    for (double& t : terms) {
        t = std::exp(t - hi);
        sum += t;
    }
    for (double& t : terms) t /= sum;
    return terms;
}

double cartpole_penalty_value(const CartpoleConfig& config, const CartpolePenalty& penalty,
                              const ContinuousState& s) {
    return penalty.x * std::abs(s.x) / config.x_bound + penalty.v * std::abs(s.v) / config.v_bound +
           penalty.theta * std::abs(s.theta) / config.theta_bound +
           penalty.omega * std::abs(s.omega) / config.omega_bound;
}

RewardModel cartpole_rewards(const CartpoleModel& model, const CartpolePenalty& penalty) {
    const CartpoleModel* m = &model;
    const CartpolePenalty pen = penalty;
    return RewardModel{[m, pen](StateId, ActionId, StateId next) {
        if (next == m->dead_state) return 0.0;
        return 1.0 - cartpole_penalty_value(m->config, pen, m->vertex_state(next));
    }};
}

std::vector<double> cartpole_r_runtime_policy(const CartpoleModel& model,
                                              const ValueFunction& value, double epsilon,
                                              const ContinuousState& state,
                                              const CartpolePenalty& penalty) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0,1]");
    const CartpoleConfig& cfg = model.config;
    const std::size_t n = cfg.forces.size();
    std::vector<double> q(n);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
        const ContinuousState landing = cartpole_step(state, cfg.forces[a], cfg.dt, cfg);
        double r = 0.0, v = 0.0;
        if (landing.alive) {
            r = 1.0 - cartpole_penalty_value(cfg, penalty, landing);
            v = model.interpolate(value.values, landing);
        }
        q[a] = r + cfg.gamma * v;
        best = std::max(best, q[a]);
    }
    std::size_t ties = 0;
    for (double qa : q)
        if (qa >= best - 1e-9) ++ties;
    std::vector<double> probs(n, epsilon / static_cast<double>(n));
    for (std::size_t a = 0; a < n; ++a)
        if (q[a] >= best - 1e-9) probs[a] += (1.0 - epsilon) / static_cast<double>(ties);
    return probs;
}

CartpoleEpisode run_cartpole_episode(const CartpoleModel& model, const ValueFunction& value,
                                     CartpoleAgent agent, double epsilon, std::size_t max_steps,
                                     SeededRng rng, std::size_t theta_bins,
                                     const CartpolePenalty& penalty) {
    const CartpoleConfig& cfg = model.config;
    CartpoleEpisode ep;
    ep.stream = rng.stream();
    ep.theta_hist.assign(theta_bins, 0);
    ep.x_theta_hist.assign(std::size_t(cfg.grid) * cfg.grid, 0);
    ContinuousState s;  // upright, centered, at rest
    double discount = 1.0;
    ep.survival = max_steps;
    const double uniform = 1.0 / static_cast<double>(cfg.forces.size());
    for (std::size_t t = 0; t < max_steps; ++t) {
        if (!s.alive) {
            if (ep.survival == max_steps) ep.survival = t;
            break;  // the dead state is absorbing; the remaining steps add nothing
        }
        // occupancy of the live trajectory
        const double half = cfg.theta_bound;
        std::size_t bin = static_cast<std::size_t>((s.theta + half) / (2.0 * half) *
                                                   static_cast<double>(theta_bins));
        if (bin >= theta_bins) bin = theta_bins - 1;
        ep.theta_hist[bin]++;
        const DimWeight bx = locate(s.x, cfg.x_bound, cfg.grid);
        const DimWeight bt = locate(s.theta, cfg.theta_bound, cfg.grid);
        const int ix = bx.frac > 0.5 ? bx.idx + 1 : bx.idx;
        const int it = bt.frac > 0.5 ? bt.idx + 1 : bt.idx;
        ep.x_theta_hist[std::size_t(ix) * cfg.grid + it]++;

        std::vector<double> probs;
        switch (agent) {
            case CartpoleAgent::entropy:
                probs = cartpole_runtime_policy(model, value, s);
                break;
            case CartpoleAgent::reward:
                probs = cartpole_r_runtime_policy(model, value, epsilon, s, penalty);
                break;
            case CartpoleAgent::random:
                probs.assign(cfg.forces.size(), uniform);
                break;
        }
        const double u = rng.next_double();
        std::size_t pick = probs.size() - 1;
        double cum = 0.0;
        for (std::size_t a = 0; a < probs.size(); ++a) {
            cum += probs[a];
            if (u < cum) {
                pick = a;
                break;
            }
        }
        ep.mean_return -= discount * model.mdp.alpha() * std::log(probs[pick]);
        discount *= cfg.gamma;
        s = cartpole_step(s, cfg.forces[pick], cfg.dt, cfg);
    }
    return ep;
}

}  // namespace maxocc
