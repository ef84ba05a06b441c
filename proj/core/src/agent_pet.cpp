#include "maxocc/envs/agent_pet.hpp"

namespace maxocc {

namespace {
constexpr int kSide = AgentPetModel::kSide;
constexpr int kFence = AgentPetModel::kFenceColumn;

bool in_arena(Cell c) { return c.x >= 0 && c.x < kSide && c.y >= 0 && c.y < kSide; }

// Pet targets given the fence state that holds while the pet moves. A closed
// fence is an obstacle: the pet stays on its side, and a pet caught on the
// fence column steps off it sideways.
std::vector<Cell> pet_targets(Cell pet, bool open) {
    std::vector<Cell> out;
    if (!open && pet.x == kFence) {
        out.push_back({pet.x - 1, pet.y});
        out.push_back({pet.x + 1, pet.y});
        return out;
    }
    for (std::uint32_t m = 0; m < kMoveCount; ++m) {
        const Cell t = moved(pet, m);
        if (!in_arena(t)) continue;
        if (!open) {
            if (t.x == kFence) continue;
            if ((pet.x < kFence) != (t.x < kFence)) continue;
        }
        out.push_back(t);
    }
    return out;
}
}  // namespace

StateId AgentPetModel::state_of(Cell agent, Cell pet, bool open) const {
    const std::uint32_t a = static_cast<std::uint32_t>(agent.y * kSide + agent.x);
    const std::uint32_t p = static_cast<std::uint32_t>(pet.y * kSide + pet.x);
    return (a * (kSide * kSide) + p) * 2 + (open ? 1 : 0);
}

Cell AgentPetModel::agent_of(StateId s) const {
    const std::uint32_t a = (s >> 1) / (kSide * kSide);
    return {static_cast<int>(a % kSide), static_cast<int>(a / kSide)};
}

Cell AgentPetModel::pet_of(StateId s) const {
    const std::uint32_t p = (s >> 1) % (kSide * kSide);
    return {static_cast<int>(p % kSide), static_cast<int>(p / kSide)};
}

AgentPetModel build_agent_pet(const AgentPetConfig& config) {
    if (!(config.gamma > 0.0 && config.gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    if (!(config.alpha > 0.0)) throw DomainError("alpha must be positive");
    if (config.beta < 0.0) throw DomainError("beta must be non-negative");

    AgentPetModel model;
    model.config = config;
    const std::size_t cells = kSide * kSide;
    const std::size_t n_states = cells * cells * 2;
    const std::size_t n_actions = kMoveCount + 1;
    MdpBuilder builder(n_states, n_actions, config.gamma, config.alpha, config.beta);
    builder.reserve(n_states * n_actions * 9);

    for (std::uint32_t a_id = 0; a_id < cells; ++a_id) {
        const Cell agent{static_cast<int>(a_id % kSide), static_cast<int>(a_id / kSide)};
        const bool at_lever = agent == model.lever;
        for (std::uint32_t p_id = 0; p_id < cells; ++p_id) {
            const Cell pet{static_cast<int>(p_id % kSide), static_cast<int>(p_id / kSide)};
            for (int f = 0; f < 2; ++f) {
                const bool open = f == 1;
                const StateId s = model.state_of(agent, pet, open);
                for (std::uint32_t act = 0; act < n_actions; ++act) {
                    if (act == AgentPetModel::kToggleAction && !at_lever) continue;
                    Cell agent_next = agent;
                    bool open_next = open;
                    if (act == AgentPetModel::kToggleAction) {
                        open_next = !open;
                    } else {
                        const Cell t = moved(agent, act);
                        if (in_arena(t)) agent_next = t;  // blocked moves fall back to staying
                    }
                    const std::vector<Cell> targets = pet_targets(pet, open_next);
                    const double w = 1.0 / static_cast<double>(targets.size());
                    builder.begin_row(s, act);
                    for (const Cell t : targets)
                        builder.add(model.state_of(agent_next, t, open_next), w);
                }
            }
        }
    }
    model.mdp = builder.finish();
    model.start_state = model.state_of({1, kSide / 2}, {kSide - 1, 0}, false);
    return model;
}

}  // namespace maxocc
