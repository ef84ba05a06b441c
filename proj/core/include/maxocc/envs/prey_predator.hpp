#pragma once

#include <vector>

#include "maxocc/baseline.hpp"
#include "maxocc/envs/grid.hpp"
#include "maxocc/mdp.hpp"

namespace maxocc {

/// Arena with a 2x3 home reachable only by the agent, a door cell, and a
/// 4x7 common area split by a two-cell vertical obstacle with openings above
/// and below it. One food cell in the bottom-right corner of the common
/// area refills the reservoir; a softmax-chasing predator moves
/// synchronously with the agent.
struct PreyPredatorConfig {
    double kappa = 2.0;  // predator inverse temperature
    int F = 15;          // energy capacity, equal to the food gain
    double gamma = 0.98;
};

struct PreyPredatorModel {
    Mdp mdp;
    PreyPredatorConfig config;
    int grid_w = 0, grid_h = 0;
    std::vector<Cell> agent_cells;     // 33
    std::vector<Cell> predator_cells;  // 26
    std::vector<int> agent_cell_at;    // y*grid_w + x -> agent cell id or -1
    std::vector<int> predator_cell_at;
    std::vector<int> pair_id;  // agent_cell * n_pred - collapsed capture pairs -> id or -1
    std::vector<std::pair<int, int>> alive_pairs;  // pair id -> (agent cell, predator cell)
    std::size_t n_pairs = 0;
    StateId dead_state = 0;
    StateId start_state = 0;
    std::uint32_t food_cell = 0;   // agent cell id
    int wall_column = 0;           // x coordinate of the obstacle column
    int wall_row_low = 0, wall_row_high = 0;

    StateId state_of(std::uint32_t agent, std::uint32_t predator, int energy) const;
    bool dead(StateId s) const { return s == dead_state; }
    std::uint32_t agent_cell_of(StateId s) const;
    std::uint32_t predator_cell_of(StateId s) const;
    int energy_of(StateId s) const;
};

/// Chasing distribution over the available predator moves:
/// p_k proportional to exp(kappa cos alpha_k), where alpha_k is the angle
/// between move k and the predator-to-agent radius vector; the stay move
/// scores cos alpha = 0.
std::vector<double> predator_step_distribution(Cell predator, Cell agent, double kappa,
                                               const std::vector<Cell>& moves);

PreyPredatorModel build_prey_predator(const PreyPredatorConfig& config, double alpha = 1.0,
                                      double beta = 0.0);

/// Survival reward: 1 per living step, 0 on dying, no shaping.
RewardModel prey_predator_rewards(const PreyPredatorModel& model);

}  // namespace maxocc
