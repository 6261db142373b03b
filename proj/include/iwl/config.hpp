#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "iwl/dynamics.hpp"
#include "iwl/graph.hpp"
#include "iwl/ioc.hpp"
#include "iwl/policy.hpp"

namespace iwl {

/// Everything one experiment run needs, loaded from a single JSON document.
/// Policies are named presets (`quadratic_3(s-d)^2`, `linear_3(s-d)`,
/// `constant:c`) or a CSV path; positions are explicit stacked vectors or
/// sampled uniformly from [-2, 2]^d with the given seed.
struct ExperimentConfig {
  // graph
  int num_nodes = 0;
  int state_dim = 2;
  std::vector<std::pair<int, int>> edges;

  // horizon
  double t0 = 0.0;
  double tf = 10.0;
  double dt = 0.01;

  // s grid
  double delta = 0.15;
  double Delta = 3.02;
  int num_points = 256;

  double separation = 0.3;  // the d in the policy presets

  // goal controller
  double goal_gain = 1.0;
  std::optional<double> goal_epsilon;  // required in cubic_threshold mode
  GoalActivation activation = GoalActivation::always_on;

  std::string true_policy;
  std::string nominal_policy;

  // positions: empty vectors mean "sample with seed"
  bool random_positions = true;
  std::uint64_t seed = 1;
  Eigen::VectorXd initial;
  Eigen::VectorXd goals;

  SolverSettings solver;
  std::string output_dir = "out";
};

/// Parses and validates; throws ConfigError with the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The resolved document written back as config_echo.json (positions always
/// explicit).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Fills in initial/goal positions when they are random: uniform over
/// [-2, 2]^d from a seeded deterministic generator. No-op when explicit.
void resolve_positions(ExperimentConfig& cfg);

/// Instantiates a policy spec on the grid. `spec` is one of the named
/// presets, `constant:<value>`, or `csv:<path>` (values re-sampled onto the
/// grid by interpolation when the file grid differs).
PolicyGrid resolve_policy(const std::string& spec, const SGrid& grid, double separation);

Graph config_graph(const ExperimentConfig& cfg);
SGrid config_sgrid(const ExperimentConfig& cfg);
GoalSpec config_goal_spec(const ExperimentConfig& cfg);  // requires resolved positions

}  // namespace iwl
