#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "maxocc/envs/grid.hpp"
#include "maxocc/mdp.hpp"
#include "maxocc/rng.hpp"

namespace maxocc {

/// One recorded episode: states[0] is the start, actions[t] was taken in
/// states[t]. Always runs its full length; absorbed episodes self-loop.
struct Trajectory {
    std::vector<StateId> states;
    std::vector<ActionId> actions;
    std::size_t length = 0;
    std::uint64_t seed = 0;  // rng stream key of the episode
};

/// Inverse-CDF pick from a sorted sparse row: the first entry whose running
/// mass exceeds u.
StateId sample_from_row(const TransitionRow& row, double u);

/// Sample a successor from the sorted sparse transition row with a single
/// uniform draw (inverse CDF).
StateId env_sample_step(const Mdp& mdp, StateId state, ActionId action, SeededRng& rng);

/// Sample an action from a policy row with a single uniform draw.
ActionId sample_action(const Policy& policy, StateId state, SeededRng& rng);

/// Roll out max_steps transitions under the policy. Once an absorbing state
/// is reached the remainder is filled with its self-loop without consuming
/// draws.
Trajectory run_episode(const Mdp& mdp, const Policy& policy, StateId start, std::size_t max_steps,
                       SeededRng rng);

/// Discounted action-state log-probability return of a logged trajectory,
/// truncated at the horizon. Throws ZeroProbabilityStep if a logged step is
/// impossible under the supplied policy or kernel.
double trajectory_return(const Trajectory& traj, const Policy& policy, const Mdp& mdp,
                         std::size_t horizon);

/// Maps a state to a spatial cell, or nothing for states without a location
/// (e.g. a merged dead state).
using CellProjection = std::function<std::optional<std::uint32_t>(StateId)>;

/// Fraction of distinct cells touched by the trajectory (all visited states,
/// start included).
double visit_fraction(const Trajectory& traj, const CellProjection& projection,
                      std::size_t total_cells);

/// Per-cell step counts over a batch of trajectories (the first `length`
/// states of each).
std::vector<std::uint64_t> occupancy_histogram(std::span<const Trajectory> trajs,
                                               const CellProjection& projection,
                                               std::size_t n_cells);

struct RotationCount {
    std::uint64_t cw = 0;
    std::uint64_t ccw = 0;
};

/// Count full loops around a vertical wall segment. A crossing event is a
/// traversal of the wall column through the open cells above or below the
/// segment; a clockwise rotation is (above, L-to-R) followed by
/// (below, R-to-L) with no crossing in between, counterclockwise the mirror
/// pair, and matched pairs consume their events.
RotationCount count_rotations(const Trajectory& traj, int wall_column,
                              std::pair<int, int> wall_rows,
                              const std::function<std::optional<Cell>(StateId)>& position);

/// Index of the first dead state, or the episode length when never dead.
std::size_t survival_time(const Trajectory& traj, const std::function<bool(StateId)>& dead);

/// Fraction of the episode's steps whose fence bit is open.
double fence_open_fraction(const Trajectory& traj, const std::function<bool(StateId)>& open);

}  // namespace maxocc
