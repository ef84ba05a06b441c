#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "maxocc/baseline.hpp"
#include "maxocc/mdp.hpp"
#include "maxocc/rng.hpp"

namespace maxocc {

/// Frictionless cart on a bounded track with a free pole. The episode is
/// over once the pole passes 36 degrees or the cart reaches the track ends.
struct CartpoleConfig {
    double cart_mass = 1.0;    // M
    double pole_mass = 0.1;    // m
    double pole_length = 1.0;  // l
    double gravity = 9.81;
    double dt = 0.02;
    double x_bound = 2.4;
    double theta_bound = 36.0 * 3.14159265358979323846 / 180.0;
    double v_bound = 3.0;
    double omega_bound = 3.0;
    int grid = 31;  // points per dimension, odd so that 0 is a grid point
    std::vector<double> forces = {-50.0, -10.0, 0.0, 10.0, 50.0};
    double gamma = 0.96;
    /// Use the textbook linear-acceleration formula instead of the one this
    /// model is defined with; sensitivity checks only.
    bool standard_x_accel = false;
};

struct ContinuousState {
    double x = 0.0;
    double v = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    bool alive = true;
};

struct Accelerations {
    double theta_ddot = 0.0;
    double x_ddot = 0.0;
};

/// Angular and linear accelerations at the given state under the applied
/// force.
Accelerations cartpole_derivatives(const ContinuousState& state, double force,
                                   const CartpoleConfig& config);

/// One explicit Euler step with all derivatives taken at the pre-step state;
/// the successor is dead once |x| or |theta| reach their bounds. Dead states
/// are unchanged by further steps.
ContinuousState cartpole_step(const ContinuousState& state, double force, double dt,
                              const CartpoleConfig& config);

/// The discretized model: grid^4 alive vertices plus one merged dead state.
/// Each (vertex, force) row spreads the Euler landing point over its
/// enclosing grid vertices with multilinear weights; landings out of bounds
/// in x or theta route to the dead state, landing velocities clamp to their
/// bounds.
class CartpoleModel {
public:
    CartpoleConfig config;
    Mdp mdp;
    StateId dead_state = 0;
    std::vector<double> axis_x, axis_v, axis_theta, axis_omega;

    std::size_t n_alive() const { return std::size_t(config.grid) * config.grid * config.grid * config.grid; }
    StateId vertex_of(int ix, int iv, int it, int io) const {
        const int g = config.grid;
        return static_cast<StateId>(((std::size_t(ix) * g + iv) * g + it) * g + io);
    }
    ContinuousState vertex_state(StateId s) const;

    /// Multilinear interpolation of per-vertex values at a continuous alive
    /// state; v and omega are clamped to their bounds first.
    double interpolate(const std::vector<double>& values, const ContinuousState& s) const;
};

CartpoleModel build_cartpole(const CartpoleConfig& config, double alpha = 1.0, double beta = 0.0);

/// Action distribution of the entropy objective at a continuous state: for
/// each force, Euler-step, interpolate the solved value at the landing point
/// (zero when dead), exponentiate with the gamma/alpha scale and normalize.
std::vector<double> cartpole_runtime_policy(const CartpoleModel& model,
                                            const ValueFunction& value,
                                            const ContinuousState& state);

/// Per-component penalty scales applied to normalized state magnitudes;
/// they sum to the 1e-5 shaping scale by default. Not pinned by any
/// external source; kept configurable.
struct CartpolePenalty {
    double x = 0.25e-5;
    double v = 0.25e-5;
    double theta = 0.25e-5;
    double omega = 0.25e-5;
};

/// Survival reward minus the small state-magnitude penalty, on the
/// discretized model.
RewardModel cartpole_rewards(const CartpoleModel& model, const CartpolePenalty& penalty = {});

double cartpole_penalty_value(const CartpoleConfig& config, const CartpolePenalty& penalty,
                              const ContinuousState& s);

/// Greedy-with-exploration distribution of the reward objective at a
/// continuous state, using interpolated one-step lookahead.
std::vector<double> cartpole_r_runtime_policy(const CartpoleModel& model,
                                              const ValueFunction& value, double epsilon,
                                              const ContinuousState& state,
                                              const CartpolePenalty& penalty = {});

/// Aggregated statistics of one seeded continuous episode.
struct CartpoleEpisode {
    std::size_t survival = 0;      // first dead step, or max_steps
    double mean_return = 0.0;      // discounted action log-probability return
    std::vector<std::uint64_t> theta_hist;   // alive-step pole angles
    std::vector<std::uint64_t> x_theta_hist; // grid x grid occupancy of alive steps
    std::uint64_t stream = 0;
};

/// Policy callback: action probabilities over the force set at a state.
using CartpolePolicyFn = std::vector<double> (*)(const CartpoleModel&, const ValueFunction&,
                                                 double, const ContinuousState&);

enum class CartpoleAgent { entropy, reward, random };

/// Run one episode from the upright center state. The epsilon argument only
/// applies to the reward agent.
CartpoleEpisode run_cartpole_episode(const CartpoleModel& model, const ValueFunction& value,
                                     CartpoleAgent agent, double epsilon, std::size_t max_steps,
                                     SeededRng rng, std::size_t theta_bins = 24,
                                     const CartpolePenalty& penalty = {});

}  // namespace maxocc
