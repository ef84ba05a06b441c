#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maxocc/mdp.hpp"
#include "maxocc/sim.hpp"

namespace maxocc {

/// One CSV row of experiment output.
struct EpisodeMetrics {
    std::uint64_t episode = 0;
    std::uint64_t seed = 0;
    std::uint64_t survival = 0;
    double visit_fraction = 0.0;
    std::uint64_t cw = 0;
    std::uint64_t ccw = 0;
    double fence_open_fraction = 0.0;
    double mean_return = 0.0;
};

/// Everything needed to run seeded tabular episodes and score them. Optional
/// hooks default to inactive (their metric columns stay zero).
struct TabularExperiment {
    const Mdp* mdp = nullptr;
    Policy policy;
    StateId start = 0;
    std::size_t total_cells = 0;
    CellProjection cell_projection;                       // visit fraction
    std::function<bool(StateId)> dead;                    // survival
    std::function<bool(StateId)> fence_open;              // fence fraction
    std::function<std::optional<Cell>(StateId)> position; // rotations
    int wall_column = 0;
    std::pair<int, int> wall_rows{0, 0};
    bool rotations = false;
    std::size_t heat_cells = 0;
    CellProjection heat_projection;                       // occupancy heatmap
    std::size_t return_horizon = 0;                       // 0 = full episode
};

struct ExperimentResult {
    std::vector<EpisodeMetrics> rows;
    std::vector<std::uint64_t> heatmap;
};

/// Run `episodes` seeded episodes of `steps` steps. Episode e draws from the
/// (seed, e) stream, so results are independent of scheduling; aggregation
/// is a fold in episode order.
ExperimentResult run_experiment(const TabularExperiment& experiment, std::size_t episodes,
                                std::size_t steps, std::uint64_t seed, int threads = 0);

/// Fixed-layout CSV with header
/// episode,seed,survival,visit_fraction,cw,ccw,fence_open_fraction,mean_return.
std::string metrics_csv(std::span<const EpisodeMetrics> rows);

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;
};
MeanSem mean_sem(std::span<const double> values);

/// One aggregated sweep row per parameter value.
struct SweepRow {
    double value = 0.0;
    MeanSem survival;
    MeanSem visit_fraction;
    MeanSem cw_fraction;  // cw / (cw + ccw), episodes with no rotations skipped
    MeanSem fence_open;
    MeanSem mean_return;
};
std::string sweep_csv(std::span<const SweepRow> rows);
SweepRow aggregate_metrics(double value, std::span<const EpisodeMetrics> rows);

}  // namespace maxocc
