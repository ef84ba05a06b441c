#pragma once

#include <string>
#include <vector>

#include "maxocc/mdp.hpp"
#include "maxocc/occupancy.hpp"
#include "maxocc/rng.hpp"

namespace maxocc {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Random well-formed model: every state keeps at least one action, rows
/// have small random support with normalized positive mass.
Mdp random_mdp(SeededRng& rng, std::size_t n_states, std::size_t n_actions, double gamma,
               double alpha = 1.0, double beta = 0.0);

/// Random chain with dense random rows (no absorption guarantee).
PathChain random_chain(SeededRng& rng, std::size_t n_nodes, double k = 1.0);

/// Random chain arranged in layers that funnel into an absorbing sink, so
/// every path absorbs within `levels` + 1 steps.
PathChain random_layered_chain(SeededRng& rng, std::size_t levels, std::size_t width,
                               double k = 1.0);

/// Random two-step decision chain with full-support distributions.
TwoStepChain random_two_step_chain(SeededRng& rng, std::size_t n_a0, std::size_t n_s1,
                                   std::size_t n_a1, std::size_t n_s2,
                                   bool state_independent_actions = false);

/// Built-in verification battery over fixed-seed random instances: the
/// occupancy oracles, the mutual-information counterexample and the solver
/// property suite. A substitute gain function (test fixtures only) must make
/// the occupancy checks fail.
std::vector<CheckResult> run_verification(std::uint64_t seed = 0x5EEDBA5Eu,
                                          const GainFn& gain = {});

}  // namespace maxocc
