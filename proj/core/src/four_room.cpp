#include "maxocc/envs/four_room.hpp"

#include <algorithm>

namespace maxocc {

namespace {

// Arena occupancy for the 11x11 grid: the middle row and column are walls
// except for one opening at the midpoint of each of the four segments.
bool is_open_cell(const FourRoomConfig& cfg, int x, int y) {
    const int side = 2 * cfg.room_size + 1;
    const int wall = cfg.room_size;
    const int mid_low = cfg.room_size / 2;          // 2 for 5x5 rooms
    const int mid_high = cfg.room_size + 1 + mid_low;  // 8
    if (x < 0 || y < 0 || x >= side || y >= side) return false;
    if (x != wall && y != wall) return true;
    if (x == wall && y == wall) return false;
    if (x == wall) return y == mid_low || y == mid_high;
    return x == mid_low || x == mid_high;
}

void check_config(const FourRoomConfig& cfg) {
    if (cfg.room_size != 5) throw DomainError("the arena geometry is derived for room_size 5");
    if (cfg.food_gain < 0) throw DomainError("food_gain must be non-negative");
    if (cfg.capacity < 1) throw DomainError("capacity must be at least 1");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
}

}  // namespace

bool FourRoomModel::is_food(std::uint32_t location) const {
    return std::find(food.begin(), food.end(), location) != food.end();
}

FourRoomModel build_four_room(const FourRoomConfig& config, double alpha, double beta) {
    check_config(config);
    FourRoomModel model;
    model.config = config;
    model.grid_side = 2 * config.room_size + 1;
    const int side = model.grid_side;
    model.location_at.assign(side * side, -1);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (is_open_cell(config, x, y)) {
                model.location_at[y * side + x] = static_cast<int>(model.locations.size());
                model.locations.push_back({x, y});
            }
    // food in the outer corner of each room, the one farthest from both of
    // the room's openings
    for (const Cell c : {Cell{0, 0}, Cell{side - 1, 0}, Cell{0, side - 1}, Cell{side - 1, side - 1}})
        model.food.push_back(static_cast<std::uint32_t>(model.location_at[c.y * side + c.x]));

    const int levels = config.capacity + 1;
    const std::size_t n_states = model.locations.size() * levels;
    MdpBuilder builder(n_states, kMoveCount, config.gamma, alpha, beta);
    builder.reserve(n_states * kMoveCount);
    for (std::uint32_t loc = 0; loc < model.locations.size(); ++loc) {
        const Cell here = model.locations[loc];
        const bool at_food = model.is_food(loc);
        for (int u = 0; u < levels; ++u) {
            const StateId s = model.state_of(loc, u);
            if (u == 0) {
                builder.begin_row(s, kStayMove);
                builder.add(s, 1.0);
                continue;
            }
            const int gained = u - 1 + (at_food ? config.food_gain : 0);
            const int u_next = std::min(gained, config.capacity);
            for (std::uint32_t a = 0; a < kMoveCount; ++a) {
                const Cell target = moved(here, a);
                if (!is_open_cell(config, target.x, target.y)) continue;
                const int loc_next = model.location_at[target.y * side + target.x];
                builder.begin_row(s, a);
                builder.add(model.state_of(static_cast<std::uint32_t>(loc_next), u_next), 1.0);
            }
        }
    }
    model.mdp = builder.finish();

    const int mid = config.room_size / 2;
    const int start_loc = model.location_at[mid * side + mid];
    model.start_state = model.state_of(static_cast<std::uint32_t>(start_loc), config.capacity);
    return model;
}

Mdp four_room_movement_graph(const FourRoomConfig& config, double alpha, double beta) {
    check_config(config);
    const int side = 2 * config.room_size + 1;
    std::vector<int> loc_at(side * side, -1);
    std::vector<Cell> cells;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (is_open_cell(config, x, y)) {
                loc_at[y * side + x] = static_cast<int>(cells.size());
                cells.push_back({x, y});
            }
    MdpBuilder builder(cells.size(), kMoveCount, config.gamma, alpha, beta);
    for (std::uint32_t loc = 0; loc < cells.size(); ++loc)
        for (std::uint32_t a = 0; a < kMoveCount; ++a) {
            const Cell target = moved(cells[loc], a);
            if (!is_open_cell(config, target.x, target.y)) continue;
            builder.begin_row(loc, a);
            builder.add(static_cast<StateId>(loc_at[target.y * side + target.x]), 1.0);
        }
    return builder.finish();
}

RewardModel four_room_rewards(const FourRoomModel& model) {
    const FourRoomModel* m = &model;
    return RewardModel{[m](StateId, ActionId, StateId next) {
        if (m->dead(next)) return 0.0;
        return 1.0 + (m->is_food(m->location_of(next)) ? 1e-5 : 0.0);
    }};
}

}  // namespace maxocc
