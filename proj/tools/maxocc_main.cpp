// maxocc: solve and simulate entropy-seeking agents in tabular and
// discretized decision processes.
//
// Exit codes: 0 success, 1 usage/config error, 2 solver did not converge,
// 3 verification failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fstream>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "maxocc/baseline.hpp"
#include "maxocc/envs/agent_pet.hpp"
#include "maxocc/envs/cartpole.hpp"
#include "maxocc/envs/four_room.hpp"
#include "maxocc/envs/prey_predator.hpp"
#include "maxocc/experiments.hpp"
#include "maxocc/solver.hpp"
#include "maxocc/value_io.hpp"
#include "maxocc/verify.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw UsageError("unknown field '" + key + "' in " + where);
}

struct RunConfig {
    std::string env;
    std::string agent = "h";
    json env_config = json::object();
    double alpha = 1.0;
    double beta = 0.0;
    maxocc::SolverConfig solver;
    maxocc::EpsilonConfig eps;
    std::size_t episodes = 1;
    std::size_t steps = 1000;
    std::uint64_t seed = 1;
    std::string value_file = "value.json";
    std::string metrics_file = "metrics.csv";
    std::string heatmap_file;  // empty = no heatmap
    std::string sweep_file = "sweep.csv";
};

RunConfig parse_run_config(const std::string& path) {
    const json j = json::parse(maxocc::read_text_file(path));
    reject_unknown(j,
                   {"env", "agent", "env_config", "alpha", "beta", "solver", "eps_config",
                    "episodes", "steps", "seed", "value_file", "metrics_file", "heatmap_file",
                    "sweep_file"},
                   "run config");
    RunConfig cfg;
    cfg.env = j.at("env").get<std::string>();
    const std::set<std::string> envs = {"four_room", "prey_predator", "cartpole", "agent_pet",
                                        "custom_mdp"};
    if (!envs.count(cfg.env)) throw UsageError("unknown env '" + cfg.env + "'");
    if (j.contains("agent")) cfg.agent = j.at("agent").get<std::string>();
    const std::set<std::string> agents = {"h", "r", "random", "kl"};
    if (!agents.count(cfg.agent)) throw UsageError("unknown agent '" + cfg.agent + "'");
    if (j.contains("env_config")) cfg.env_config = j.at("env_config");
    if (j.contains("alpha")) {
        if (cfg.env == "agent_pet")
            throw UsageError("agent_pet carries alpha inside env_config");
        cfg.alpha = j.at("alpha").get<double>();
    }
    if (j.contains("beta")) {
        if (cfg.env == "agent_pet") throw UsageError("agent_pet carries beta inside env_config");
        cfg.beta = j.at("beta").get<double>();
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        reject_unknown(s, {"tolerance", "max_iterations"}, "solver");
        if (s.contains("tolerance")) cfg.solver.tolerance = s.at("tolerance").get<double>();
        if (s.contains("max_iterations"))
            cfg.solver.max_iterations = s.at("max_iterations").get<std::uint64_t>();
    }
    if (j.contains("eps_config")) {
        const json& s = j.at("eps_config");
        reject_unknown(s, {"epsilon", "tolerance", "max_iterations"}, "eps_config");
        if (s.contains("epsilon")) cfg.eps.epsilon = s.at("epsilon").get<double>();
        if (s.contains("tolerance")) cfg.eps.tolerance = s.at("tolerance").get<double>();
        if (s.contains("max_iterations"))
            cfg.eps.max_iterations = s.at("max_iterations").get<std::uint64_t>();
    }
    if (j.contains("episodes")) cfg.episodes = j.at("episodes").get<std::size_t>();
    if (j.contains("steps")) cfg.steps = j.at("steps").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("value_file")) cfg.value_file = j.at("value_file").get<std::string>();
    if (j.contains("metrics_file")) cfg.metrics_file = j.at("metrics_file").get<std::string>();
    if (j.contains("heatmap_file")) cfg.heatmap_file = j.at("heatmap_file").get<std::string>();
    if (j.contains("sweep_file")) cfg.sweep_file = j.at("sweep_file").get<std::string>();
    return cfg;
}

maxocc::FourRoomConfig parse_four_room(const json& j) {
    reject_unknown(j, {"room_size", "food_gain", "capacity", "gamma"}, "four_room env_config");
    maxocc::FourRoomConfig cfg;
    if (j.contains("room_size")) cfg.room_size = j.at("room_size").get<int>();
    if (j.contains("food_gain")) cfg.food_gain = j.at("food_gain").get<int>();
    if (j.contains("capacity")) cfg.capacity = j.at("capacity").get<int>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    return cfg;
}

maxocc::PreyPredatorConfig parse_prey_predator(const json& j) {
    reject_unknown(j, {"kappa", "F", "gamma"}, "prey_predator env_config");
    maxocc::PreyPredatorConfig cfg;
    if (j.contains("kappa")) cfg.kappa = j.at("kappa").get<double>();
    if (j.contains("F")) cfg.F = j.at("F").get<int>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    return cfg;
}

maxocc::CartpoleConfig parse_cartpole(const json& j) {
    reject_unknown(j,
                   {"M", "m", "l", "g_grav", "dt", "x_bound", "theta_bound", "v_bound",
                    "omega_bound", "grid", "forces", "gamma"},
                   "cartpole env_config");
    maxocc::CartpoleConfig cfg;
    if (j.contains("M")) cfg.cart_mass = j.at("M").get<double>();
    if (j.contains("m")) cfg.pole_mass = j.at("m").get<double>();
    if (j.contains("l")) cfg.pole_length = j.at("l").get<double>();
    if (j.contains("g_grav")) cfg.gravity = j.at("g_grav").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("x_bound")) cfg.x_bound = j.at("x_bound").get<double>();
    if (j.contains("theta_bound")) cfg.theta_bound = j.at("theta_bound").get<double>();
    if (j.contains("v_bound")) cfg.v_bound = j.at("v_bound").get<double>();
    if (j.contains("omega_bound")) cfg.omega_bound = j.at("omega_bound").get<double>();
    if (j.contains("grid")) cfg.grid = j.at("grid").get<int>();
    if (j.contains("forces")) cfg.forces = j.at("forces").get<std::vector<double>>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    return cfg;
}

maxocc::AgentPetConfig parse_agent_pet(const json& j) {
    reject_unknown(j, {"gamma", "alpha", "beta"}, "agent_pet env_config");
    maxocc::AgentPetConfig cfg;
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    return cfg;
}

// A built environment with everything the commands need.
struct BuiltEnv {
    maxocc::Mdp mdp;  // moved-from env models keep their own copy out of laziness; small ones only
    std::optional<maxocc::FourRoomModel> four_room;
    std::optional<maxocc::PreyPredatorModel> prey_predator;
    std::optional<maxocc::CartpoleModel> cartpole;
    std::optional<maxocc::AgentPetModel> agent_pet;
    maxocc::StateId start = 0;
    std::optional<maxocc::RewardModel> rewards;  // for the reward agent
};

BuiltEnv build_env(const RunConfig& cfg) {
    BuiltEnv env;
    if (cfg.env == "four_room") {
        env.four_room = maxocc::build_four_room(parse_four_room(cfg.env_config), cfg.alpha, cfg.beta);
        env.start = env.four_room->start_state;
        env.rewards = maxocc::four_room_rewards(*env.four_room);
    } else if (cfg.env == "prey_predator") {
        env.prey_predator =
            maxocc::build_prey_predator(parse_prey_predator(cfg.env_config), cfg.alpha, cfg.beta);
        env.start = env.prey_predator->start_state;
        env.rewards = maxocc::prey_predator_rewards(*env.prey_predator);
    } else if (cfg.env == "cartpole") {
        env.cartpole = maxocc::build_cartpole(parse_cartpole(cfg.env_config), cfg.alpha, cfg.beta);
        env.rewards = maxocc::cartpole_rewards(*env.cartpole);
    } else if (cfg.env == "agent_pet") {
        env.agent_pet = maxocc::build_agent_pet(parse_agent_pet(cfg.env_config));
        env.start = env.agent_pet->start_state;
    } else if (cfg.env == "custom_mdp") {
        reject_unknown(cfg.env_config, {"mdp_file", "start_state"}, "custom_mdp env_config");
        env.mdp = maxocc::Mdp::load_json_file(cfg.env_config.at("mdp_file").get<std::string>());
        if (cfg.env_config.contains("start_state"))
            env.start = cfg.env_config.at("start_state").get<maxocc::StateId>();
    }
    return env;
}

const maxocc::Mdp& env_mdp(const BuiltEnv& env) {
    if (env.four_room) return env.four_room->mdp;
    if (env.prey_predator) return env.prey_predator->mdp;
    if (env.cartpole) return env.cartpole->mdp;
    if (env.agent_pet) return env.agent_pet->mdp;
    return env.mdp;
}

std::string out_path(const std::string& out_dir, const std::string& name) {
    if (name.empty()) return name;
    fs::path p(name);
    if (!out_dir.empty() && p.is_relative()) p = fs::path(out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

bool is_hval_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    return in && std::string(magic, 4) == "HVAL";
}

int cmd_solve(const RunConfig& cfg, const std::string& out_dir, const std::string& format,
              int threads) {
    (void)threads;
    if (cfg.agent == "random") throw UsageError("the random agent has nothing to solve");
    const auto t0 = std::chrono::steady_clock::now();
    const BuiltEnv env = build_env(cfg);
    const maxocc::Mdp& mdp = env_mdp(env);
    const std::string path = out_path(out_dir, cfg.value_file);
    maxocc::ValueFileMeta meta{mdp.gamma(), mdp.alpha(), mdp.beta(), std::nullopt};

    auto finish = [&](const std::vector<double>& values, std::uint64_t iterations, double delta,
                      double residual, bool converged) {
        if (format == "hval")
            maxocc::save_value_hval(path, values);
        else
            maxocc::save_value_json(path, meta, values);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("states %zu\nconverged %s\niterations %llu\nfinal_delta %.6g\n",
                    mdp.n_states(), converged ? "yes" : "no",
                    static_cast<unsigned long long>(iterations), delta);
        if (residual >= 0.0) std::printf("residual %.6g\n", residual);
        std::printf("value_file %s\nwall_time_s %.3f\n", path.c_str(), wall);
    };

    try {
        if (cfg.agent == "h") {
            const maxocc::SolveReport report = maxocc::solve(mdp, cfg.solver);
            finish(report.value.values, report.iterations, report.final_delta, report.residual, true);
        } else if (cfg.agent == "kl") {
            const maxocc::SolveReport report =
                maxocc::solve_kl(mdp, maxocc::uniform_prior(mdp), cfg.solver);
            finish(report.value.values, report.iterations, report.final_delta, report.residual, true);
        } else {  // r agent
            if (!env.rewards) throw UsageError("this environment has no reward model");
            meta.epsilon = cfg.eps.epsilon;
            const maxocc::ValueFunction value = maxocc::solve_eps_greedy(mdp, *env.rewards, cfg.eps);
            finish(value.values, 0, 0.0, -1.0, true);
        }
    } catch (const maxocc::MaxIterationsExceeded& e) {
        finish(e.last_values, e.iterations, e.last_delta, -1.0, false);
        return 2;
    }
    return 0;
}

maxocc::ValueFunction load_value_for(const RunConfig& cfg, const maxocc::Mdp& mdp,
                                     const std::string& out_dir) {
    const std::string path = out_path(out_dir, cfg.value_file);
    if (!fs::exists(path)) throw UsageError("value file '" + path + "' not found; run solve first");
    std::vector<double> values;
    if (is_hval_file(path)) {
        values = maxocc::load_value_hval(path);
    } else {
        auto [meta, v] = maxocc::load_value_json(path);
        if (std::abs(meta.gamma - mdp.gamma()) > 1e-12 || std::abs(meta.alpha - mdp.alpha()) > 1e-12 ||
            std::abs(meta.beta - mdp.beta()) > 1e-12)
            throw UsageError("value file weights do not match the configured environment");
        if (cfg.agent == "r" && meta.epsilon && std::abs(*meta.epsilon - cfg.eps.epsilon) > 1e-12)
            throw UsageError("value file epsilon does not match eps_config.epsilon");
        values = std::move(v);
    }
    if (values.size() != mdp.n_states())
        throw UsageError("value file state count does not match the environment");
    return maxocc::ValueFunction{std::move(values)};
}

maxocc::Policy uniform_policy(const maxocc::Mdp& mdp) {
    maxocc::Policy policy(mdp.n_states(), mdp.n_actions());
    for (maxocc::StateId s = 0; s < mdp.n_states(); ++s) {
        const double w = 1.0 / static_cast<double>(mdp.available_count(s));
        for (maxocc::ActionId a = 0; a < mdp.n_actions(); ++a)
            if (mdp.available(s, a)) policy.at(s, a) = w;
    }
    return policy;
}

maxocc::Policy make_policy(const RunConfig& cfg, const BuiltEnv& env, const maxocc::Mdp& mdp,
                           const std::string& out_dir) {
    if (cfg.agent == "random") return uniform_policy(mdp);
    const maxocc::ValueFunction value = load_value_for(cfg, mdp, out_dir);
    if (cfg.agent == "h") return maxocc::extract_policy(mdp, value, maxocc::build_entropy_cache(mdp));
    if (cfg.agent == "kl")
        return maxocc::extract_policy(mdp, value, maxocc::build_entropy_cache(mdp),
                                      maxocc::uniform_prior(mdp));
    if (!env.rewards) throw UsageError("this environment has no reward model");
    return maxocc::eps_greedy_policy(mdp, *env.rewards, value, cfg.eps.epsilon);
}

maxocc::TabularExperiment make_experiment(const BuiltEnv& env, const maxocc::Mdp& mdp) {
    maxocc::TabularExperiment ex;
    ex.mdp = &mdp;
    ex.start = env.start;
    if (env.four_room) {
        const maxocc::FourRoomModel* m = &*env.four_room;
        ex.total_cells = m->n_locations();
        ex.cell_projection = [m](maxocc::StateId s) { return std::optional<std::uint32_t>(m->location_of(s)); };
        ex.dead = [m](maxocc::StateId s) { return m->dead(s); };
        const int side = m->grid_side;
        ex.heat_cells = std::size_t(side) * side;
        ex.heat_projection = [m, side](maxocc::StateId s) {
            const maxocc::Cell c = m->locations[m->location_of(s)];
            return std::optional<std::uint32_t>(static_cast<std::uint32_t>(c.y * side + c.x));
        };
    } else if (env.prey_predator) {
        const maxocc::PreyPredatorModel* m = &*env.prey_predator;
        ex.total_cells = m->agent_cells.size();
        ex.cell_projection = [m](maxocc::StateId s) -> std::optional<std::uint32_t> {
            if (m->dead(s)) return std::nullopt;
            return m->agent_cell_of(s);
        };
        ex.dead = [m](maxocc::StateId s) { return m->dead(s); };
        ex.position = [m](maxocc::StateId s) -> std::optional<maxocc::Cell> {
            if (m->dead(s)) return std::nullopt;
            return m->agent_cells[m->agent_cell_of(s)];
        };
        ex.rotations = true;
        ex.wall_column = m->wall_column;
        ex.wall_rows = {m->wall_row_low, m->wall_row_high};
        const int w = m->grid_w;
        ex.heat_cells = std::size_t(m->grid_w) * m->grid_h;
        ex.heat_projection = [m, w](maxocc::StateId s) -> std::optional<std::uint32_t> {
            if (m->dead(s)) return std::nullopt;
            const maxocc::Cell c = m->agent_cells[m->agent_cell_of(s)];
            return static_cast<std::uint32_t>(c.y * w + c.x);
        };
    } else if (env.agent_pet) {
        const maxocc::AgentPetModel* m = &*env.agent_pet;
        constexpr int side = maxocc::AgentPetModel::kSide;
        ex.total_cells = side * side;
        ex.cell_projection = [m](maxocc::StateId s) {
            const maxocc::Cell c = m->agent_of(s);
            return std::optional<std::uint32_t>(static_cast<std::uint32_t>(c.y * side + c.x));
        };
        ex.fence_open = [m](maxocc::StateId s) { return m->fence_open(s); };
        ex.heat_cells = side * side;  // pet occupancy
        ex.heat_projection = [m](maxocc::StateId s) {
            const maxocc::Cell c = m->pet_of(s);
            return std::optional<std::uint32_t>(static_cast<std::uint32_t>(c.y * side + c.x));
        };
    } else {
        const maxocc::Mdp* mp = &mdp;
        ex.dead = [mp](maxocc::StateId s) { return mp->is_absorbing(s); };
    }
    return ex;
}

struct SimOutput {
    std::vector<maxocc::EpisodeMetrics> rows;
    std::vector<std::uint64_t> heatmap;
    std::size_t heat_w = 0, heat_h = 0;
};

SimOutput simulate_once(const RunConfig& cfg, const BuiltEnv& env, const std::string& out_dir,
                        int threads) {
    SimOutput out;
    if (env.cartpole) {
        const maxocc::CartpoleModel& model = *env.cartpole;
        maxocc::ValueFunction value;
        maxocc::CartpoleAgent agent = maxocc::CartpoleAgent::random;
        if (cfg.agent == "h") {
            agent = maxocc::CartpoleAgent::entropy;
            value = load_value_for(cfg, model.mdp, out_dir);
        } else if (cfg.agent == "r") {
            agent = maxocc::CartpoleAgent::reward;
            value = load_value_for(cfg, model.mdp, out_dir);
        } else if (cfg.agent == "kl") {
            throw UsageError("the kl agent is not wired to the cartpole runtime policy");
        }
        const int g = model.config.grid;
        out.heat_w = g;
        out.heat_h = g;
        out.heatmap.assign(std::size_t(g) * g, 0);
        std::vector<maxocc::CartpoleEpisode> eps(cfg.episodes);
        const auto n = static_cast<std::int64_t>(cfg.episodes);
#ifdef _OPENMP
        const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
        for (std::int64_t e = 0; e < n; ++e)
            eps[e] = maxocc::run_cartpole_episode(model, value, agent, cfg.eps.epsilon, cfg.steps,
                                                  maxocc::SeededRng(cfg.seed, e));
        for (std::size_t e = 0; e < eps.size(); ++e) {
            maxocc::EpisodeMetrics m;
            m.episode = e;
            m.seed = maxocc::SeededRng(cfg.seed, e).key();
            m.survival = eps[e].survival;
            std::size_t filled = 0;
            for (std::size_t i = 0; i < out.heatmap.size(); ++i) {
                out.heatmap[i] += eps[e].x_theta_hist[i];
                if (eps[e].x_theta_hist[i]) ++filled;
            }
            m.visit_fraction = static_cast<double>(filled) / static_cast<double>(out.heatmap.size());
            m.mean_return = eps[e].mean_return;
            out.rows.push_back(m);
        }
        return out;
    }
    const maxocc::Mdp& mdp = env_mdp(env);
    maxocc::TabularExperiment ex = make_experiment(env, mdp);
    ex.policy = make_policy(cfg, env, mdp, out_dir);
    maxocc::ExperimentResult result = maxocc::run_experiment(ex, cfg.episodes, cfg.steps, cfg.seed, threads);
    out.rows = std::move(result.rows);
    out.heatmap = std::move(result.heatmap);
    if (env.four_room) out.heat_w = out.heat_h = env.four_room->grid_side;
    if (env.prey_predator) {
        out.heat_w = env.prey_predator->grid_w;
        out.heat_h = env.prey_predator->grid_h;
    }
    if (env.agent_pet) out.heat_w = out.heat_h = maxocc::AgentPetModel::kSide;
    return out;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir, const std::string& format,
                 int threads) {
    const BuiltEnv env = build_env(cfg);
    const SimOutput out = simulate_once(cfg, env, out_dir, threads);
    const std::string csv_path = out_path(out_dir, cfg.metrics_file);
    maxocc::write_text_file(csv_path, maxocc::metrics_csv(out.rows));
    std::printf("metrics_file %s\nepisodes %zu\n", csv_path.c_str(), out.rows.size());
    const bool want_pgm = !cfg.heatmap_file.empty() || format == "pgm";
    if (want_pgm && !out.heatmap.empty()) {
        const std::string name = cfg.heatmap_file.empty() ? "occupancy.pgm" : cfg.heatmap_file;
        const std::string pgm_path = out_path(out_dir, name);
        maxocc::save_pgm16(pgm_path, out.heatmap, out.heat_w, out.heat_h);
        std::printf("heatmap_file %s\n", pgm_path.c_str());
    }
    return 0;
}

int cmd_sweep(RunConfig cfg, const std::string& out_dir, const std::string& parameter,
              const std::vector<double>& values, int threads) {
    const std::set<std::string> known = {"food_gain", "beta", "epsilon", "kappa", "F"};
    if (!known.count(parameter)) throw UsageError("unknown sweep parameter '" + parameter + "'");
    if (values.empty()) throw UsageError("sweep needs at least one value");
    std::vector<maxocc::SweepRow> rows;
    for (const double v : values) {
        RunConfig point = cfg;
        if (parameter == "food_gain") {
            if (v != std::floor(v)) throw UsageError("food_gain values must be integral");
            point.env_config["food_gain"] = static_cast<int>(v);
        } else if (parameter == "F") {
            if (v != std::floor(v)) throw UsageError("F values must be integral");
            point.env_config["F"] = static_cast<int>(v);
        } else if (parameter == "kappa") {
            point.env_config["kappa"] = v;
        } else if (parameter == "epsilon") {
            point.eps.epsilon = v;
        } else {  // beta
            if (point.env == "agent_pet")
                point.env_config["beta"] = v;
            else
                point.beta = v;
        }
        const BuiltEnv env = build_env(point);
        const maxocc::Mdp& mdp = env_mdp(env);
        // fresh in-memory solve per point; the value_file is not touched
        maxocc::ValueFunction value;
        if (point.agent == "h")
            value = maxocc::solve(mdp, point.solver).value;
        else if (point.agent == "kl")
            value = maxocc::solve_kl(mdp, maxocc::uniform_prior(mdp), point.solver).value;
        else if (point.agent == "r")
            value = maxocc::solve_eps_greedy(mdp, *env.rewards, point.eps);

        std::vector<maxocc::EpisodeMetrics> metrics;
        if (env.cartpole) {
            maxocc::CartpoleAgent agent = maxocc::CartpoleAgent::random;
            if (point.agent == "h") agent = maxocc::CartpoleAgent::entropy;
            if (point.agent == "r") agent = maxocc::CartpoleAgent::reward;
            for (std::size_t e = 0; e < point.episodes; ++e) {
                const maxocc::CartpoleEpisode ep = maxocc::run_cartpole_episode(
                    *env.cartpole, value, agent, point.eps.epsilon, point.steps,
                    maxocc::SeededRng(point.seed, e));
                maxocc::EpisodeMetrics m;
                m.episode = e;
                m.survival = ep.survival;
                m.mean_return = ep.mean_return;
                metrics.push_back(m);
            }
        } else {
            maxocc::TabularExperiment ex = make_experiment(env, mdp);
            if (point.agent == "random")
                ex.policy = uniform_policy(mdp);
            else if (point.agent == "r")
                ex.policy = maxocc::eps_greedy_policy(mdp, *env.rewards, value, point.eps.epsilon);
            else if (point.agent == "kl")
                ex.policy = maxocc::extract_policy(mdp, value, maxocc::build_entropy_cache(mdp),
                                                   maxocc::uniform_prior(mdp));
            else
                ex.policy = maxocc::extract_policy(mdp, value, maxocc::build_entropy_cache(mdp));
            metrics = maxocc::run_experiment(ex, point.episodes, point.steps, point.seed, threads).rows;
        }
        rows.push_back(maxocc::aggregate_metrics(v, metrics));
        std::printf("sweep %s=%.6g done (%zu episodes)\n", parameter.c_str(), v, metrics.size());
    }
    const std::string path = out_path(out_dir, cfg.sweep_file);
    maxocc::write_text_file(path, maxocc::sweep_csv(rows));
    std::printf("sweep_file %s\n", path.c_str());
    return 0;
}

int cmd_verify() {
    const std::vector<maxocc::CheckResult> results = maxocc::run_verification();
    bool all = true;
    for (const maxocc::CheckResult& r : results) {
        std::printf("%-34s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
        all = all && r.pass;
    }
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-seeking agents in tabular decision processes"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::string parameter;
    std::vector<double> values;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "run configuration JSON");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory prefix");
        cmd->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--threads", threads, "worker threads (0 = auto; never changes results)");
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "hval", "csv", "pgm"}));
    };

    CLI::App* solve = app.add_subcommand("solve", "solve an environment and write the value file");
    add_common(solve, true);
    CLI::App* simulate = app.add_subcommand("simulate", "run seeded episodes and write metrics");
    add_common(simulate, true);
    CLI::App* sweep = app.add_subcommand("sweep", "solve+simulate across one parameter");
    add_common(sweep, true);
    sweep->add_option("--parameter", parameter, "food_gain | beta | epsilon | kappa | F")->required();
    sweep->add_option("--values", values, "parameter values")->required()->delimiter(',');
    CLI::App* verify = app.add_subcommand("verify", "run the built-in verification battery");
    add_common(verify, false);

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (verify->parsed()) return cmd_verify();
        RunConfig cfg = parse_run_config(config_path);
        if (seed_set) cfg.seed = seed;
        if (solve->parsed()) return cmd_solve(cfg, out_dir, format.empty() ? "json" : format, threads);
        if (simulate->parsed()) return cmd_simulate(cfg, out_dir, format, threads);
        return cmd_sweep(cfg, out_dir, parameter, values, threads);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const maxocc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
}
