#pragma once

#include <algorithm>
#include <initializer_list>
#include <utility>
#include <vector>

#include "maxocc/mdp.hpp"

namespace maxocc::test {

struct RowSpec {
    StateId s;
    ActionId a;
    std::vector<std::pair<StateId, double>> entries;
};

/// Small-model helper: rows in any order, duplicates merged by the builder.
inline Mdp make_mdp(std::size_t n_states, std::size_t n_actions, double gamma,
                    std::vector<RowSpec> rows, double alpha = 1.0, double beta = 0.0) {
    std::sort(rows.begin(), rows.end(), [n_actions](const RowSpec& x, const RowSpec& y) {
        return std::size_t(x.s) * n_actions + x.a < std::size_t(y.s) * n_actions + y.a;
    });
    MdpBuilder builder(n_states, n_actions, gamma, alpha, beta);
    for (const RowSpec& row : rows) {
        builder.begin_row(row.s, row.a);
        for (const auto& [j, p] : row.entries) builder.add(j, p);
    }
    return builder.finish();
}

/// Single state with n deterministic self-loop actions.
inline Mdp self_loop_mdp(std::size_t n_actions, double gamma, double alpha = 1.0,
                         double beta = 0.0) {
    std::vector<RowSpec> rows;
    for (ActionId a = 0; a < n_actions; ++a) rows.push_back({0, a, {{0, 1.0}}});
    return make_mdp(1, n_actions, gamma, std::move(rows), alpha, beta);
}

/// Two states, each with a deterministic stay and switch action.
inline Mdp two_state_symmetric(double gamma, double alpha = 1.0, double beta = 0.0) {
    return make_mdp(2, 2, gamma,
                    {{0, 0, {{0, 1.0}}}, {0, 1, {{1, 1.0}}}, {1, 0, {{1, 1.0}}}, {1, 1, {{0, 1.0}}}},
                    alpha, beta);
}

}  // namespace maxocc::test
