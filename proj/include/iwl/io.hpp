#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "iwl/dynamics.hpp"
#include "iwl/policy.hpp"

namespace iwl::io {

/// Shortest-exact decimal rendering of a double (17 significant digits), so
/// every CSV round-trips losslessly.
std::string format_double(double v);

/// Trajectory CSV, header `t,x1_1,...,x1_d,...,xN_d`, one row per step.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          int state_dim);

/// Reads a trajectory CSV; recovers the per-agent dimension from the header
/// and validates uniform time steps. Throws IoError naming the offending
/// row/column on parse failures.
struct LoadedTrajectory {
  Trajectory traj;
  int state_dim = 1;
};
LoadedTrajectory read_trajectory_csv(const std::filesystem::path& path);

/// Policy CSV, header `s,u`.
void write_policy_csv(const std::filesystem::path& path, const PolicyGrid& p);
PolicyGrid read_policy_csv(const std::filesystem::path& path);

/// Per-edge time series, header `t,w1,...,wm`. Header-only when there are no
/// columns.
void write_timeseries_csv(const std::filesystem::path& path, const std::string& prefix,
                          const Eigen::VectorXd& times, const Eigen::MatrixXd& columns);
struct LoadedTimeseries {
  Eigen::VectorXd times;
  Eigen::MatrixXd columns;
};
LoadedTimeseries read_timeseries_csv(const std::filesystem::path& path);

/// Co-state CSV, header `t,l1_1,...,lN_d`.
void write_costate_csv(const std::filesystem::path& path, const Trajectory& grid,
                       const std::vector<Eigen::VectorXd>& lambdas, int state_dim);

/// Cost history CSV, header `iter,cost,grad_norm`.
void write_history_csv(const std::filesystem::path& path, const std::vector<double>& cost,
                       const std::vector<double>& grad_norm);

}  // namespace iwl::io
