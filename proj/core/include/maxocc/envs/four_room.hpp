#pragma once

#include <vector>

#include "maxocc/baseline.hpp"
#include "maxocc/envs/grid.hpp"
#include "maxocc/mdp.hpp"

namespace maxocc {

/// Four 5x5 rooms joined through one opening in the middle of each inner
/// wall, one food cell per room in the corner farthest from the openings,
/// and an energy reservoir drained by one unit per step.
struct FourRoomConfig {
    int room_size = 5;  // fixed; the arena geometry is derived for 5
    int food_gain = 10;
    int capacity = 100;
    double gamma = 0.99;
};

struct FourRoomModel {
    Mdp mdp;
    FourRoomConfig config;
    int grid_side = 0;                  // 2*room_size + 1
    std::vector<Cell> locations;        // location id -> coordinates
    std::vector<int> location_at;       // y*grid_side + x -> location id or -1
    std::vector<std::uint32_t> food;    // location ids
    StateId start_state = 0;            // middle of the lower-left room, full energy

    std::size_t n_locations() const { return locations.size(); }
    StateId state_of(std::uint32_t location, int energy) const {
        return static_cast<StateId>(location * (config.capacity + 1) + energy);
    }
    std::uint32_t location_of(StateId s) const { return s / (config.capacity + 1); }
    int energy_of(StateId s) const { return static_cast<int>(s % (config.capacity + 1)); }
    bool dead(StateId s) const { return energy_of(s) == 0; }
    bool is_food(std::uint32_t location) const;
};

FourRoomModel build_four_room(const FourRoomConfig& config, double alpha = 1.0, double beta = 0.0);

/// The location-only movement graph of the same arena (no energy axis):
/// 104 states, deterministic moves.
Mdp four_room_movement_graph(const FourRoomConfig& config, double alpha = 1.0, double beta = 0.0);

/// Survival reward 1 per living step plus a bonus five orders of magnitude
/// smaller whenever the successor sits on a food cell.
RewardModel four_room_rewards(const FourRoomModel& model);

}  // namespace maxocc
