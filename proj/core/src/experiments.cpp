#include "maxocc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maxocc {

namespace {
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

ExperimentResult run_experiment(const TabularExperiment& experiment, std::size_t episodes,
                                std::size_t steps, std::uint64_t seed, int threads) {
    if (!experiment.mdp) throw DomainError("experiment has no model");
    const Mdp& mdp = *experiment.mdp;
    validate_policy(mdp, experiment.policy);

    std::vector<EpisodeMetrics> rows(episodes);
    std::vector<std::vector<std::uint64_t>> heat(episodes);
    const auto n = static_cast<std::int64_t>(episodes);
#ifdef _OPENMP
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (std::int64_t e = 0; e < n; ++e) {
        SeededRng rng(seed, static_cast<std::uint64_t>(e));
        const Trajectory traj = run_episode(mdp, experiment.policy, experiment.start, steps, rng);
        EpisodeMetrics m;
        m.episode = static_cast<std::uint64_t>(e);
        m.seed = traj.seed;
        m.survival = experiment.dead ? survival_time(traj, experiment.dead) : steps;
        if (experiment.cell_projection && experiment.total_cells > 0)
            m.visit_fraction = visit_fraction(traj, experiment.cell_projection, experiment.total_cells);
        if (experiment.rotations && experiment.position) {
            const RotationCount rc =
                count_rotations(traj, experiment.wall_column, experiment.wall_rows, experiment.position);
            m.cw = rc.cw;
            m.ccw = rc.ccw;
        }
        if (experiment.fence_open) m.fence_open_fraction = fence_open_fraction(traj, experiment.fence_open);
        const std::size_t horizon = experiment.return_horizon ? experiment.return_horizon : steps;
        m.mean_return = trajectory_return(traj, experiment.policy, mdp, horizon);
        rows[e] = m;
        if (experiment.heat_projection && experiment.heat_cells > 0)
            heat[e] = occupancy_histogram(std::span<const Trajectory>(&traj, 1),
                                          experiment.heat_projection, experiment.heat_cells);
    }

    ExperimentResult result;
    result.rows = std::move(rows);
    if (experiment.heat_projection && experiment.heat_cells > 0) {
        result.heatmap.assign(experiment.heat_cells, 0);
        for (const auto& h : heat)
            for (std::size_t i = 0; i < h.size(); ++i) result.heatmap[i] += h[i];
    }
    return result;
}

std::string metrics_csv(std::span<const EpisodeMetrics> rows) {
    std::ostringstream out;
    out << "episode,seed,survival,visit_fraction,cw,ccw,fence_open_fraction,mean_return\n";
    for (const EpisodeMetrics& m : rows) {
        out << m.episode << "," << m.seed << "," << m.survival << "," << fmt17(m.visit_fraction)
            << "," << m.cw << "," << m.ccw << "," << fmt17(m.fence_open_fraction) << ","
            << fmt17(m.mean_return) << "\n";
    }
    return out.str();
}

MeanSem mean_sem(std::span<const double> values) {
    MeanSem out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (const double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sem = std::sqrt(ss / static_cast<double>(values.size() - 1)) /
              std::sqrt(static_cast<double>(values.size()));
    return out;
}

SweepRow aggregate_metrics(double value, std::span<const EpisodeMetrics> rows) {
    SweepRow out;
    out.value = value;
    std::vector<double> survival, visit, cwf, fence, ret;
    for (const EpisodeMetrics& m : rows) {
        survival.push_back(static_cast<double>(m.survival));
        visit.push_back(m.visit_fraction);
        fence.push_back(m.fence_open_fraction);
        ret.push_back(m.mean_return);
        const std::uint64_t total = m.cw + m.ccw;
        if (total > 0) cwf.push_back(static_cast<double>(m.cw) / static_cast<double>(total));
    }
    out.survival = mean_sem(survival);
    out.visit_fraction = mean_sem(visit);
    out.cw_fraction = mean_sem(cwf);
    out.fence_open = mean_sem(fence);
    out.mean_return = mean_sem(ret);
    return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << "value,survival_mean,survival_sem,visit_fraction_mean,visit_fraction_sem,"
           "cw_fraction_mean,cw_fraction_sem,fence_open_mean,fence_open_sem,"
           "return_mean,return_sem\n";
    for (const SweepRow& r : rows) {
        out << fmt17(r.value) << "," << fmt17(r.survival.mean) << "," << fmt17(r.survival.sem) << ","
            << fmt17(r.visit_fraction.mean) << "," << fmt17(r.visit_fraction.sem) << ","
            << fmt17(r.cw_fraction.mean) << "," << fmt17(r.cw_fraction.sem) << ","
            << fmt17(r.fence_open.mean) << "," << fmt17(r.fence_open.sem) << ","
            << fmt17(r.mean_return.mean) << "," << fmt17(r.mean_return.sem) << "\n";
    }
    return out.str();
}

}  // namespace maxocc
