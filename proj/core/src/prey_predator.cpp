#include "maxocc/envs/prey_predator.hpp"

#include <cmath>

namespace maxocc {

namespace {
// Layout, in (x, y) with y growing upward:
//   home      x in {0,1},  y in {0,1,2}   (agent only)
//   door      (2,1)                       (agent only)
//   common    x in {3..9}, y in {0..3}    (agent and predator)
//   obstacle  (6,1), (6,2)                (nobody)
//   food      (9,0)
constexpr int kW = 10, kH = 4;
constexpr int kWallX = 6;

bool in_common(int x, int y) {
    if (x < 3 || x > 9 || y < 0 || y > 3) return false;
    return !(x == kWallX && (y == 1 || y == 2));
}
bool in_home(int x, int y) { return x >= 0 && x <= 1 && y >= 0 && y <= 2; }
bool is_door(int x, int y) { return x == 2 && y == 1; }
bool agent_can_be(int x, int y) { return in_home(x, y) || is_door(x, y) || in_common(x, y); }
}  // namespace

std::vector<double> predator_step_distribution(Cell predator, Cell agent, double kappa,
                                               const std::vector<Cell>& moves) {
    if (moves.empty()) throw DomainError("predator needs at least one available move");
    if (kappa < 0.0) throw DomainError("kappa must be non-negative");
    const double rx = static_cast<double>(agent.x - predator.x);
    const double ry = static_cast<double>(agent.y - predator.y);
    const double rn = std::hypot(rx, ry);
    std::vector<double> score(moves.size(), 0.0);
    double hi = -1.0;
    for (std::size_t k = 0; k < moves.size(); ++k) {
        const double dx = moves[k].x, dy = moves[k].y;
        const double dn = std::hypot(dx, dy);
        double c = 0.0;  // stay (and the degenerate co-located case) score zero
        if (dn > 0.0 && rn > 0.0) c = (dx * rx + dy * ry) / (dn * rn);
        score[k] = kappa * c;
        hi = std::max(hi, score[k]);
    }
    double sum = 0.0;
    for (double& v : score) {
        v = std::exp(v - hi);
        sum += v;
    }
    for (double& v : score) v /= sum;
    return score;
}

StateId PreyPredatorModel::state_of(std::uint32_t agent, std::uint32_t predator, int energy) const {
    const int id = pair_id[agent * predator_cells.size() + predator];
    if (id < 0) throw DomainError("capture pair has no alive state");
    if (energy < 1 || energy > config.F) throw DomainError("energy out of range");
    return static_cast<StateId>(std::size_t(id) * config.F + (energy - 1));
}

std::uint32_t PreyPredatorModel::agent_cell_of(StateId s) const {
    return static_cast<std::uint32_t>(alive_pairs.at(s / config.F).first);
}

std::uint32_t PreyPredatorModel::predator_cell_of(StateId s) const {
    return static_cast<std::uint32_t>(alive_pairs.at(s / config.F).second);
}

int PreyPredatorModel::energy_of(StateId s) const { return static_cast<int>(s % config.F) + 1; }

PreyPredatorModel build_prey_predator(const PreyPredatorConfig& config, double alpha, double beta) {
    if (config.F < 1) throw DomainError("F must be at least 1");
    if (config.kappa < 0.0) throw DomainError("kappa must be non-negative");
    if (!(config.gamma > 0.0 && config.gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");

    PreyPredatorModel model;
    model.config = config;
    model.grid_w = kW;
    model.grid_h = kH;
    model.wall_column = kWallX;
    model.wall_row_low = 1;
    model.wall_row_high = 2;
    model.agent_cell_at.assign(kW * kH, -1);
    model.predator_cell_at.assign(kW * kH, -1);
    for (int y = 0; y < kH; ++y)
        for (int x = 0; x < kW; ++x) {
            if (agent_can_be(x, y)) {
                model.agent_cell_at[y * kW + x] = static_cast<int>(model.agent_cells.size());
                model.agent_cells.push_back({x, y});
            }
            if (in_common(x, y)) {
                model.predator_cell_at[y * kW + x] = static_cast<int>(model.predator_cells.size());
                model.predator_cells.push_back({x, y});
            }
        }
    model.food_cell =
        static_cast<std::uint32_t>(model.agent_cell_at[0 * kW + 9]);  // bottom-right of common

    const std::size_t n_agent = model.agent_cells.size();
    const std::size_t n_pred = model.predator_cells.size();
    // alive pairs exclude co-location (those collapse into the dead state)
    model.pair_id.assign(n_agent * n_pred, -1);
    for (std::size_t a = 0; a < n_agent; ++a)
        for (std::size_t p = 0; p < n_pred; ++p) {
            if (model.agent_cells[a] == model.predator_cells[p]) continue;
            model.pair_id[a * n_pred + p] = static_cast<int>(model.alive_pairs.size());
            model.alive_pairs.emplace_back(static_cast<int>(a), static_cast<int>(p));
        }
    model.n_pairs = model.alive_pairs.size();
    const std::size_t n_states = model.n_pairs * config.F + 1;
    model.dead_state = static_cast<StateId>(n_states - 1);

    // predator move distributions depend only on (predator, agent) cells
    std::vector<Cell> pred_moves;
    MdpBuilder builder(n_states, kMoveCount, config.gamma, alpha, beta);
    builder.reserve(n_states * kMoveCount * 6);
    for (std::size_t pair = 0; pair < model.n_pairs; ++pair) {
        const auto [a_id, p_id] = model.alive_pairs[pair];
        const Cell agent = model.agent_cells[a_id];
        const Cell predator = model.predator_cells[p_id];
        pred_moves.clear();
        for (std::uint32_t m = 0; m < kMoveCount; ++m) {
            const Cell t = moved(predator, m);
            if (in_common(t.x, t.y)) pred_moves.push_back(kMoves[m]);
        }
        const std::vector<double> pred_probs =
            predator_step_distribution(predator, agent, config.kappa, pred_moves);
        const bool at_food = static_cast<std::uint32_t>(a_id) == model.food_cell;
        for (int u = 1; u <= config.F; ++u) {
            const StateId s = static_cast<StateId>(pair * config.F + (u - 1));
            const int u_next = at_food ? config.F : u - 1;
            for (std::uint32_t a = 0; a < kMoveCount; ++a) {
                const Cell target = moved(agent, a);
                if (!agent_can_be(target.x, target.y)) continue;
                builder.begin_row(s, a);
                const int a_next = model.agent_cell_at[target.y * kW + target.x];
                if (u_next == 0) {
                    builder.add(model.dead_state, 1.0);
                    continue;
                }
                for (std::size_t m = 0; m < pred_moves.size(); ++m) {
                    const Cell pt = {predator.x + pred_moves[m].x, predator.y + pred_moves[m].y};
                    const int p_next = model.predator_cell_at[pt.y * kW + pt.x];
                    const int id = model.pair_id[std::size_t(a_next) * n_pred + p_next];
                    if (id < 0)  // predator lands on the agent: captured
                        builder.add(model.dead_state, pred_probs[m]);
                    else
                        builder.add(static_cast<StateId>(std::size_t(id) * config.F + (u_next - 1)),
                                    pred_probs[m]);
                }
            }
        }
    }
    builder.begin_row(model.dead_state, kStayMove);
    builder.add(model.dead_state, 1.0);
    model.mdp = builder.finish();

    const int start_agent = model.agent_cell_at[1 * kW + 1];   // middle of the home block
    const int start_pred = model.predator_cell_at[3 * kW + 9];  // far corner of the common area
    model.start_state = model.state_of(static_cast<std::uint32_t>(start_agent),
                                       static_cast<std::uint32_t>(start_pred), config.F);
    return model;
}

RewardModel prey_predator_rewards(const PreyPredatorModel& model) {
    const StateId dead = model.dead_state;
    return RewardModel{[dead](StateId, ActionId, StateId next) {
        return next == dead ? 0.0 : 1.0;
    }};
}

}  // namespace maxocc
