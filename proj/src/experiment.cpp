#include "iwl/experiment.hpp"

#include <cmath>
#include <fstream>

#include "iwl/errors.hpp"
#include "iwl/io.hpp"
#include "iwl/kernels.hpp"

namespace iwl {

namespace fs = std::filesystem;

namespace {

Eigen::VectorXd sample_times(const Trajectory& traj) {
  Eigen::VectorXd t(traj.states.size());
  for (int n = 0; n < t.size(); ++n) t(n) = traj.time(n);
  return t;
}

void check_demo_matches_config(const ExperimentConfig& cfg, const Trajectory& demo,
                               int file_state_dim) {
  if (file_state_dim != cfg.state_dim ||
      demo.states.front().size() != cfg.num_nodes * cfg.state_dim)
    throw ConfigError("demo file dimensions disagree with the config graph");
  if (std::abs(demo.t0 - cfg.t0) > 1e-9 || std::abs(demo.tf - cfg.tf) > 1e-9 ||
      std::abs(demo.dt - cfg.dt) > 1e-9)
    throw ConfigError("demo file time grid disagrees with the config horizon");
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

IocProblem build_problem(const ExperimentConfig& cfg, Trajectory demo) {
  ExperimentConfig resolved = cfg;
  resolve_positions(resolved);
  const SGrid grid = config_sgrid(resolved);
  return make_problem(config_graph(resolved), std::move(demo), config_goal_spec(resolved),
                      resolve_policy(resolved.nominal_policy, grid, resolved.separation));
}

Trajectory generate_demo(const ExperimentConfig& cfg) {
  ExperimentConfig resolved = cfg;
  resolve_positions(resolved);
  const Graph g = config_graph(resolved);
  const PolicyGrid truth =
      resolve_policy(resolved.true_policy, config_sgrid(resolved), resolved.separation);
  return simulate(resolved.initial, truth, g, config_goal_spec(resolved), resolved.t0,
                  resolved.tf, resolved.dt);
}

void run_demo(const ExperimentConfig& cfg, const fs::path& out_dir) {
  ExperimentConfig resolved = cfg;
  resolve_positions(resolved);
  fs::create_directories(out_dir);

  const Graph g = config_graph(resolved);
  const SGrid grid = config_sgrid(resolved);
  const PolicyGrid truth = resolve_policy(resolved.true_policy, grid, resolved.separation);
  const Trajectory demo = simulate(resolved.initial, truth, g, config_goal_spec(resolved),
                                   resolved.t0, resolved.tf, resolved.dt);

  io::write_trajectory_csv(out_dir / "demo.csv", demo, g.state_dim);
  const Eigen::MatrixXd dist = kernels::distance_rows(demo.states, g);
  io::write_timeseries_csv(out_dir / "true_weights.csv", "w", sample_times(demo),
                           kernels::weight_rows(truth, dist));
  write_json(out_dir / "config_echo.json", config_to_json(resolved));
}

SolveReport run_learn(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const io::LoadedTrajectory loaded = io::read_trajectory_csv(out_dir / "demo.csv");
  check_demo_matches_config(cfg, loaded.traj, loaded.state_dim);

  const IocProblem prob = build_problem(cfg, loaded.traj);
  const SolveReport report = learn(prob, prob.nominal, cfg.solver);

  io::write_policy_csv(out_dir / "u_star.csv", report.learned);
  io::write_history_csv(out_dir / "cost_history.csv", report.cost_history,
                        report.grad_norm_history);

  // Rollout, weights and co-state under the learned policy.
  const Trajectory fwd = simulate(prob.demo.states.front(), report.learned, prob.graph,
                                  prob.goal_spec, prob.demo.t0, prob.demo.tf, prob.demo.dt);
  const Eigen::MatrixXd dist = kernels::distance_rows(fwd.states, prob.graph);
  io::write_timeseries_csv(out_dir / "learned_weights.csv", "w", sample_times(fwd),
                           kernels::weight_rows(report.learned, dist));
  const CostateTrajectory cst = backward_pass(prob, report.learned, fwd);
  io::write_costate_csv(out_dir / "lambda.csv", prob.demo, cst.lambdas, prob.graph.state_dim);

  nlohmann::json doc;
  doc["iterations"] = report.iterations;
  doc["termination"] = to_string(report.termination);
  doc["final_cost"] = report.cost_history.back();
  doc["final_grad_norm"] = report.grad_norm_history.back();
  doc["cost_history"] = report.cost_history;
  doc["grad_norm_history"] = report.grad_norm_history;
  write_json(out_dir / "report.json", doc);

  if (report.termination == Termination::line_search_fail)
    throw NumericError("learn: line search failed at iteration " +
                       std::to_string(report.iterations) + " (best policy written)");
  return report;
}

Metrics run_eval(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const io::LoadedTrajectory loaded = io::read_trajectory_csv(out_dir / "demo.csv");
  check_demo_matches_config(cfg, loaded.traj, loaded.state_dim);
  const PolicyGrid learned = io::read_policy_csv(out_dir / "u_star.csv");

  const IocProblem prob = build_problem(cfg, loaded.traj);
  const SGrid& grid = prob.grid();
  if (learned.grid.num_points != grid.num_points ||
      std::abs(learned.grid.delta - grid.delta) > 1e-9 ||
      std::abs(learned.grid.Delta - grid.Delta) > 1e-9)
    throw ConfigError("learned policy grid disagrees with the config s-grid");
  const PolicyGrid truth = resolve_policy(cfg.true_policy, grid, cfg.separation);

  const Trajectory& demo = prob.demo;
  const Trajectory fwd = simulate(demo.states.front(), learned, prob.graph, prob.goal_spec,
                                  demo.t0, demo.tf, demo.dt);

  const Eigen::MatrixXd demo_dist = kernels::distance_rows(demo.states, prob.graph);
  const Eigen::MatrixXd fwd_dist = kernels::distance_rows(fwd.states, prob.graph);
  const Eigen::MatrixXd w_true = kernels::weight_rows(truth, demo_dist);
  const Eigen::MatrixXd w_learned = kernels::weight_rows(learned, fwd_dist);

  Metrics metrics;
  metrics.final_cost = total_cost_with(prob, learned, fwd);

  double traj_err = 0.0;
  for (std::size_t t = 0; t < fwd.states.size(); ++t)
    traj_err += (fwd.states[t] - demo.states[t]).squaredNorm();
  metrics.traj_mse =
      traj_err / (static_cast<double>(fwd.states.size()) * demo.states.front().size());

  if (demo_dist.size() > 0) {
    metrics.weight_mse = (w_learned - w_true).squaredNorm() / w_true.size();
    metrics.visited_lo = demo_dist.minCoeff();
    metrics.visited_hi = demo_dist.maxCoeff();
  }

  double policy_err = 0.0;
  int visited_nodes = 0;
  for (int q = 0; q < grid.num_points; ++q) {
    const double s = grid.node(q);
    if (demo_dist.size() > 0 && s >= metrics.visited_lo && s <= metrics.visited_hi) {
      const double e = learned.values(q) - truth.values(q);
      policy_err += e * e;
      ++visited_nodes;
    }
  }
  metrics.policy_rmse_visited = visited_nodes > 0 ? std::sqrt(policy_err / visited_nodes) : 0.0;

  // Comparison tables.
  {
    std::ofstream out(out_dir / "policy_compare.csv");
    if (!out) throw IoError("cannot open for writing: policy_compare.csv");
    out << "s,u_learned,u_true\n";
    for (int q = 0; q < grid.num_points; ++q)
      out << io::format_double(grid.node(q)) << "," << io::format_double(learned.values(q))
          << "," << io::format_double(truth.values(q)) << "\n";
  }
  {
    std::ofstream out(out_dir / "weights_compare.csv");
    if (!out) throw IoError("cannot open for writing: weights_compare.csv");
    out << "t";
    for (int k = 1; k <= w_true.cols(); ++k) out << ",w" << k << "_learned,w" << k << "_true";
    out << "\n";
    if (w_true.cols() > 0) {
      for (int t = 0; t < w_true.rows(); ++t) {
        out << io::format_double(demo.time(t));
        for (int k = 0; k < w_true.cols(); ++k)
          out << "," << io::format_double(w_learned(t, k)) << ","
              << io::format_double(w_true(t, k));
        out << "\n";
      }
    }
  }
  {
    std::ofstream out(out_dir / "traj_compare.csv");
    if (!out) throw IoError("cannot open for writing: traj_compare.csv");
    const int d = prob.graph.state_dim;
    out << "t";
    for (int a = 1; a <= prob.graph.num_nodes; ++a)
      for (int c = 1; c <= d; ++c) out << ",x" << a << "_" << c << "_learned";
    for (int a = 1; a <= prob.graph.num_nodes; ++a)
      for (int c = 1; c <= d; ++c) out << ",x" << a << "_" << c << "_true";
    out << "\n";
    for (std::size_t t = 0; t < fwd.states.size(); ++t) {
      out << io::format_double(demo.time(static_cast<int>(t)));
      for (int c = 0; c < fwd.states[t].size(); ++c)
        out << "," << io::format_double(fwd.states[t](c));
      for (int c = 0; c < demo.states[t].size(); ++c)
        out << "," << io::format_double(demo.states[t](c));
      out << "\n";
    }
  }

  nlohmann::json doc;
  doc["traj_mse"] = metrics.traj_mse;
  doc["weight_mse"] = metrics.weight_mse;
  doc["policy_rmse_visited"] = metrics.policy_rmse_visited;
  doc["final_cost"] = metrics.final_cost;
  doc["visited_range"] = {metrics.visited_lo, metrics.visited_hi};
  write_json(out_dir / "metrics.json", doc);
  return metrics;
}

Metrics run_all(const ExperimentConfig& cfg, const fs::path& out_dir) {
  run_demo(cfg, out_dir);
  run_learn(cfg, out_dir);
  return run_eval(cfg, out_dir);
}

}  // namespace iwl
