#pragma once

#include <filesystem>

#include "iwl/config.hpp"
#include "iwl/dynamics.hpp"
#include "iwl/ioc.hpp"

namespace iwl {

/// Demonstration rollout under the configured true policy, from the resolved
/// initial positions.
Trajectory generate_demo(const ExperimentConfig& cfg);

/// Fit quality of a learned policy against the demonstration.
struct Metrics {
  double traj_mse = 0.0;            // mean squared error over samples x coordinates
  double weight_mse = 0.0;          // mean squared error over samples x edges
  double policy_rmse_visited = 0.0; // RMS policy error on the visited s-range
  double final_cost = 0.0;
  double visited_lo = 0.0;          // demonstration's realized distance range
  double visited_hi = 0.0;
};

/// Writes demo.csv, true_weights.csv and config_echo.json into out_dir.
void run_demo(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Loads the demonstration from out_dir, runs the solver, writes report.json,
/// u_star.csv, learned_weights.csv, lambda.csv and cost_history.csv. Throws
/// NumericError after writing when the line search failed (the report and
/// best policy are on disk either way).
SolveReport run_learn(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Loads demonstration + learned policy, writes metrics.json and the three
/// comparison tables (policy_compare.csv, weights_compare.csv,
/// traj_compare.csv).
Metrics run_eval(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// demo, learn, eval in sequence.
Metrics run_all(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Assembles the inverse problem a config describes around an existing
/// demonstration.
IocProblem build_problem(const ExperimentConfig& cfg, Trajectory demo);

}  // namespace iwl
