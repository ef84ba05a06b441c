#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "maxocc/errors.hpp"

namespace maxocc {

/// One sparse transition row: successor ids (sorted ascending) and their
/// probabilities, stored as parallel arrays.
struct TransitionRow {
    std::span<const StateId> next;
    std::span<const double> prob;
    std::size_t size() const { return next.size(); }
    bool empty() const { return next.empty(); }
};

/// Finite action-state decision process with an availability mask, sparse
/// transition kernel and entropy weights. Immutable after construction;
/// safe to share read-only across threads.
class Mdp {
public:
    /// An empty model; fill through MdpBuilder or from_json.
    Mdp() = default;

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }
    double gamma() const { return gamma_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    bool available(StateId s, ActionId a) const {
        return available_[static_cast<std::size_t>(s) * n_actions_ + a] != 0;
    }
    std::size_t available_count(StateId s) const {
        std::size_t n = 0;
        for (ActionId a = 0; a < n_actions_; ++a) n += available(s, a);
        return n;
    }
    TransitionRow row(StateId s, ActionId a) const {
        const std::size_t r = static_cast<std::size_t>(s) * n_actions_ + a;
        const std::uint64_t b = row_begin_[r], e = row_begin_[r + 1];
        return {std::span<const StateId>(succ_.data() + b, e - b),
                std::span<const double>(prob_.data() + b, e - b)};
    }
    std::uint64_t n_entries() const { return static_cast<std::uint64_t>(succ_.size()); }

    /// True for states whose only available action is a self-loop with
    /// probability one: once entered, the process never leaves.
    bool is_absorbing(StateId s) const;

    /// Serialize to the canonical JSON document (fixed field order,
    /// probabilities with 17 significant digits).
    std::string to_json() const;
    static Mdp from_json(const std::string& text);
    static Mdp load_json_file(const std::string& path);
    void save_json_file(const std::string& path) const;

private:
    friend class MdpBuilder;

    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    double gamma_ = 0.0;
    double alpha_ = 1.0;
    double beta_ = 0.0;
    std::vector<std::uint8_t> available_;
    std::vector<std::uint64_t> row_begin_;
    std::vector<StateId> succ_;
    std::vector<double> prob_;
};

/// Incremental Mdp constructor. Rows must be opened in increasing
/// (state, action) order; every opened row marks the action available.
/// finish() sorts each row by successor id, merges duplicate successors
/// and runs validate().
class MdpBuilder {
public:
    MdpBuilder(std::size_t n_states, std::size_t n_actions, double gamma, double alpha,
               double beta);

    void begin_row(StateId s, ActionId a);
    void add(StateId next, double prob);
    /// Reserve storage for an expected total number of transition entries.
    void reserve(std::uint64_t entries);
    Mdp finish(bool run_validate = true);

private:
    Mdp mdp_;
    std::int64_t current_row_ = -1;
    bool finished_ = false;
};

/// Per-state action probabilities. Rows are simplex points with zero mass on
/// unavailable actions.
struct Policy {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> rows;  // row-major n_states x n_actions

    Policy() = default;
    Policy(std::size_t ns, std::size_t na) : n_states(ns), n_actions(na), rows(ns * na, 0.0) {}
    double at(StateId s, ActionId a) const { return rows[std::size_t(s) * n_actions + a]; }
    double& at(StateId s, ActionId a) { return rows[std::size_t(s) * n_actions + a]; }
    std::span<const double> row(StateId s) const {
        return {rows.data() + std::size_t(s) * n_actions, n_actions};
    }
};

/// Per-state value estimates in nats.
struct ValueFunction {
    std::vector<double> values;
    std::size_t size() const { return values.size(); }
    double operator[](StateId s) const { return values[s]; }
};

/// Scaled successor entropies: h[s][a] = (beta/alpha) * H(S'|s,a), zero for
/// unavailable pairs.
struct EntropyCache {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> h;

    EntropyCache() = default;
    EntropyCache(std::size_t ns, std::size_t na) : n_states(ns), n_actions(na), h(ns * na, 0.0) {}
    double at(StateId s, ActionId a) const { return h[std::size_t(s) * n_actions + a]; }
    double& at(StateId s, ActionId a) { return h[std::size_t(s) * n_actions + a]; }
};

/// Check every Mdp invariant; throws RowSumError, NoActionError or
/// GhostTransitionError on the first violation found.
void validate(const Mdp& mdp);

/// Shannon entropy -sum p ln p in nats, with 0 ln 0 = 0. Throws
/// NotADistribution if the mass deviates from one by more than 1e-9, or if
/// any entry is negative.
double discrete_entropy(std::span<const double> p);

/// Precompute (beta/alpha)-scaled successor entropies for every available
/// (state, action) pair.
EntropyCache build_entropy_cache(const Mdp& mdp);

/// Marginalize the action choice: M[i][j] = sum_k pi[i][k] p_ijk. Returns a
/// dense row-major n_states x n_states matrix; intended for models small
/// enough that a dense matrix is reasonable.
std::vector<double> policy_transition_matrix(const Mdp& mdp, const Policy& policy);

/// Validate a policy against an Mdp: simplex rows within 1e-9 and zero mass
/// on unavailable actions.
void validate_policy(const Mdp& mdp, const Policy& policy);

}  // namespace maxocc
