#pragma once

#include <vector>

#include "maxocc/envs/grid.hpp"
#include "maxocc/mdp.hpp"

namespace maxocc {

/// 5x5 arena with a pet that moves uniformly at random, a fence on the
/// middle column that blocks only the pet when closed, and a lever in the
/// bottom-left corner whose extra action toggles the fence.
struct AgentPetConfig {
    double gamma = 0.99;
    double alpha = 1.0;
    double beta = 0.0;
};

struct AgentPetModel {
    Mdp mdp;
    AgentPetConfig config;
    static constexpr int kSide = 5;
    static constexpr int kFenceColumn = 2;
    static constexpr std::uint32_t kToggleAction = 9;  // after the 9 movement actions
    Cell lever{0, 0};
    StateId start_state = 0;  // agent mid second column, pet bottom-right, fence closed

    StateId state_of(Cell agent, Cell pet, bool open) const;
    Cell agent_of(StateId s) const;
    Cell pet_of(StateId s) const;
    bool fence_open(StateId s) const { return (s & 1u) != 0; }
};

AgentPetModel build_agent_pet(const AgentPetConfig& config);

}  // namespace maxocc
