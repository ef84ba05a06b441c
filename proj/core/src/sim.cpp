#include "maxocc/sim.hpp"

#include <cmath>
#include <unordered_set>

namespace maxocc {

StateId sample_from_row(const TransitionRow& row, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        cum += row.prob[i];
        if (u < cum) return row.next[i];
    }
    return row.next[row.size() - 1];  // guard against roundoff at u ~ 1
}

StateId env_sample_step(const Mdp& mdp, StateId state, ActionId action, SeededRng& rng) {
    if (!mdp.available(state, action)) throw UnavailableAction(state, action);
    return sample_from_row(mdp.row(state, action), rng.next_double());
}

ActionId sample_action(const Policy& policy, StateId state, SeededRng& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    ActionId last = 0;
    for (ActionId a = 0; a < policy.n_actions; ++a) {
        const double p = policy.at(state, a);
        if (p <= 0.0) continue;
        last = a;
        cum += p;
        if (u < cum) return a;
    }
    return last;
}

Trajectory run_episode(const Mdp& mdp, const Policy& policy, StateId start, std::size_t max_steps,
                       SeededRng rng) {
    if (start >= mdp.n_states()) throw DomainError("start state out of range");
    Trajectory traj;
    traj.seed = rng.key();
    traj.length = max_steps;
    traj.states.reserve(max_steps + 1);
    traj.actions.reserve(max_steps);
    traj.states.push_back(start);
    StateId s = start;
    for (std::size_t t = 0; t < max_steps; ++t) {
        if (mdp.is_absorbing(s)) {
            ActionId loop = 0;
            for (ActionId a = 0; a < mdp.n_actions(); ++a)
                if (mdp.available(s, a)) {
                    loop = a;
                    break;
                }
            for (; t < max_steps; ++t) {
                traj.actions.push_back(loop);
                traj.states.push_back(s);
            }
            break;
        }
        const ActionId a = sample_action(policy, s, rng);
        const StateId next = env_sample_step(mdp, s, a, rng);
        traj.actions.push_back(a);
        traj.states.push_back(next);
        s = next;
    }
    return traj;
}

double trajectory_return(const Trajectory& traj, const Policy& policy, const Mdp& mdp,
                         std::size_t horizon) {
    const std::size_t steps = std::min(horizon, traj.actions.size());
    double total = 0.0;
    double discount = 1.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const StateId s = traj.states[t];
        const ActionId a = traj.actions[t];
        const StateId next = traj.states[t + 1];
        const double pi = policy.at(s, a);
        if (pi <= 0.0) throw ZeroProbabilityStep(t);
        double log_term = mdp.alpha() * std::log(pi);
        if (mdp.beta() != 0.0) {
            const TransitionRow row = mdp.row(s, a);
            double p = 0.0;
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row.next[i] == next) {
                    p = row.prob[i];
                    break;
                }
            if (p <= 0.0) throw ZeroProbabilityStep(t);
            log_term += mdp.beta() * std::log(p);
        } else {
            // still reject physically impossible logged steps
            const TransitionRow row = mdp.row(s, a);
            bool found = false;
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row.next[i] == next && row.prob[i] > 0.0) {
                    found = true;
                    break;
                }
            if (!found) throw ZeroProbabilityStep(t);
        }
        total -= discount * log_term;
        discount *= mdp.gamma();
    }
    return total;
}

double visit_fraction(const Trajectory& traj, const CellProjection& projection,
                      std::size_t total_cells) {
    if (total_cells == 0) throw DomainError("total cell count must be positive");
    std::unordered_set<std::uint32_t> seen;
    for (const StateId s : traj.states) {
        const auto cell = projection(s);
        if (cell) seen.insert(*cell);
    }
    return static_cast<double>(seen.size()) / static_cast<double>(total_cells);
}

std::vector<std::uint64_t> occupancy_histogram(std::span<const Trajectory> trajs,
                                               const CellProjection& projection,
                                               std::size_t n_cells) {
    std::vector<std::uint64_t> counts(n_cells, 0);
    for (const Trajectory& traj : trajs)
        for (std::size_t t = 0; t < traj.length && t < traj.states.size(); ++t) {
            const auto cell = projection(traj.states[t]);
            if (cell) counts.at(*cell)++;
        }
    return counts;
}

namespace {
struct Crossing {
    bool above;        // crossed through the open cells above the wall segment
    bool left_to_right;
};
}  // namespace

RotationCount count_rotations(const Trajectory& traj, int wall_column,
                              std::pair<int, int> wall_rows,
                              const std::function<std::optional<Cell>(StateId)>& position) {
    std::vector<Crossing> events;
    int side = 0;  // -1 left, +1 right, 0 unknown
    bool on_column = false;
    bool column_above = false;
    int entered_from = 0;
    for (const StateId s : traj.states) {
        const auto pos = position(s);
        if (!pos) break;  // dead; nothing moves afterwards
        if (pos->x == wall_column) {
            if (!on_column) {
                on_column = true;
                entered_from = side;
                column_above = pos->y > wall_rows.second;
            }
            continue;
        }
        const int now = pos->x < wall_column ? -1 : 1;
        if (on_column) {
            on_column = false;
            if (entered_from != 0 && now != entered_from)
                events.push_back({column_above, entered_from < 0});
        }
        side = now;
    }
    RotationCount out;
    std::size_t i = 0;
    while (i + 1 < events.size()) {
        const Crossing& a = events[i];
        const Crossing& b = events[i + 1];
        const bool cw = a.above && a.left_to_right && !b.above && !b.left_to_right;
        const bool ccw = !a.above && a.left_to_right && b.above && !b.left_to_right;
        if (cw || ccw) {
            if (cw)
                ++out.cw;
            else
                ++out.ccw;
            i += 2;
        } else {
            ++i;
        }
    }
    return out;
}

std::size_t survival_time(const Trajectory& traj, const std::function<bool(StateId)>& dead) {
    for (std::size_t t = 0; t < traj.states.size(); ++t)
        if (dead(traj.states[t])) return t;
    return traj.length;
}

double fence_open_fraction(const Trajectory& traj, const std::function<bool(StateId)>& open) {
    if (traj.length == 0) return 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < traj.length && t < traj.states.size(); ++t)
        if (open(traj.states[t])) ++count;
    return static_cast<double>(count) / static_cast<double>(traj.length);
}

}  // namespace maxocc
