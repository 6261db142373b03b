#include "iwl/config.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "iwl/errors.hpp"
#include "iwl/io.hpp"

namespace iwl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) fail(std::string("missing key '") + key + "'");
  return doc.at(key);
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("key '") + key + "' has the wrong type");
  }
}

template <typename T>
T get_req(const json& doc, const char* key) {
  try {
    return require(doc, key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("key '") + key + "' has the wrong type");
  }
}

Eigen::VectorXd parse_positions(const json& arr, int num_nodes, int state_dim, const char* key) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != num_nodes)
    fail(std::string(key) + " must list one position per agent");
  Eigen::VectorXd out(num_nodes * state_dim);
  for (int a = 0; a < num_nodes; ++a) {
    const json& p = arr.at(a);
    if (!p.is_array() || static_cast<int>(p.size()) != state_dim)
      fail(std::string(key) + "[" + std::to_string(a) + "] must have state_dim entries");
    for (int c = 0; c < state_dim; ++c) out(a * state_dim + c) = p.at(c).get<double>();
  }
  return out;
}

json positions_to_json(const Eigen::VectorXd& stacked, int state_dim) {
  json arr = json::array();
  for (int a = 0; a < stacked.size() / state_dim; ++a) {
    json p = json::array();
    for (int c = 0; c < state_dim; ++c) p.push_back(stacked(a * state_dim + c));
    arr.push_back(p);
  }
  return arr;
}

// Uniform double in [lo, hi) built from the raw 64-bit stream, so sampled
// positions do not depend on the standard library's distribution internals.
double uniform_from(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;

  const json& graph = require(doc, "graph");
  cfg.num_nodes = get_req<int>(graph, "num_nodes");
  cfg.state_dim = get_or<int>(graph, "state_dim", 2);
  for (const json& e : require(graph, "edges")) {
    if (!e.is_array() || e.size() != 2) fail("edges must be [j, i] pairs");
    cfg.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }

  const json& horizon = require(doc, "horizon");
  cfg.t0 = get_or<double>(horizon, "t0", 0.0);
  cfg.tf = get_req<double>(horizon, "tf");
  cfg.dt = get_req<double>(horizon, "dt");

  const json& sgrid = require(doc, "s_grid");
  cfg.delta = get_req<double>(sgrid, "delta");
  cfg.Delta = get_req<double>(sgrid, "Delta");
  cfg.num_points = get_or<int>(sgrid, "num_points", 256);

  cfg.separation = get_or<double>(doc, "separation", 0.3);

  if (doc.contains("goal")) {
    const json& goal = doc.at("goal");
    cfg.goal_gain = get_or<double>(goal, "gain", 1.0);
    const std::string mode = get_or<std::string>(goal, "activation", "always");
    if (mode == "always")
      cfg.activation = GoalActivation::always_on;
    else if (mode == "threshold")
      cfg.activation = GoalActivation::cubic_threshold;
    else
      fail("goal.activation must be 'always' or 'threshold'");
    if (goal.contains("epsilon")) cfg.goal_epsilon = goal.at("epsilon").get<double>();
  }
  if (cfg.activation == GoalActivation::cubic_threshold && !cfg.goal_epsilon)
    fail("goal.epsilon is required in threshold mode");

  cfg.true_policy = get_req<std::string>(doc, "true_policy");
  cfg.nominal_policy = get_req<std::string>(doc, "nominal_policy");

  const json& pos = require(doc, "positions");
  const json& init = require(pos, "initial");
  const json& goals = require(pos, "goal");
  if (init.is_string() || goals.is_string()) {
    if (!(init.is_string() && init.get<std::string>() == "random" && goals.is_string() &&
          goals.get<std::string>() == "random"))
      fail("positions.initial/goal must both be 'random' or both explicit");
    cfg.random_positions = true;
    if (!pos.contains("seed")) fail("positions.seed is required with random positions");
    cfg.seed = pos.at("seed").get<std::uint64_t>();
  } else {
    cfg.random_positions = false;
    cfg.seed = get_or<std::uint64_t>(pos, "seed", 0);
    cfg.initial = parse_positions(init, cfg.num_nodes, cfg.state_dim, "positions.initial");
    cfg.goals = parse_positions(goals, cfg.num_nodes, cfg.state_dim, "positions.goal");
  }

  if (doc.contains("solver")) {
    const json& solver = doc.at("solver");
    cfg.solver.max_iter = get_or<int>(solver, "max_iter", cfg.solver.max_iter);
    cfg.solver.grad_tol = get_or<double>(solver, "grad_tol", cfg.solver.grad_tol);
    if (solver.contains("armijo")) {
      const json& armijo = solver.at("armijo");
      cfg.solver.armijo.initial_step =
          get_or<double>(armijo, "l0", cfg.solver.armijo.initial_step);
      cfg.solver.armijo.backtrack = get_or<double>(armijo, "beta", cfg.solver.armijo.backtrack);
      cfg.solver.armijo.sufficient_decrease =
          get_or<double>(armijo, "c", cfg.solver.armijo.sufficient_decrease);
      cfg.solver.armijo.max_backtracks =
          get_or<int>(armijo, "max_backtracks", cfg.solver.armijo.max_backtracks);
    }
  }
  cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir);

  // Cross-field validation, reusing the library constructors' checks.
  try {
    config_graph(cfg);
    config_sgrid(cfg);
    horizon_steps(cfg.t0, cfg.tf, cfg.dt);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(cfg.separation >= 0.0)) fail("separation must be >= 0");
  if (!(cfg.goal_gain > 0.0)) fail("goal.gain must be > 0");
  if (cfg.goal_epsilon && !(*cfg.goal_epsilon > 0.0)) fail("goal.epsilon must be > 0");
  if (cfg.solver.max_iter < 0) fail("solver.max_iter must be >= 0");
  if (!(cfg.solver.grad_tol >= 0.0)) fail("solver.grad_tol must be >= 0");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["graph"]["num_nodes"] = cfg.num_nodes;
  doc["graph"]["state_dim"] = cfg.state_dim;
  json edges = json::array();
  for (const auto& [j, i] : cfg.edges) edges.push_back(json::array({j, i}));
  doc["graph"]["edges"] = edges;
  doc["horizon"] = {{"t0", cfg.t0}, {"tf", cfg.tf}, {"dt", cfg.dt}};
  doc["s_grid"] = {{"delta", cfg.delta}, {"Delta", cfg.Delta}, {"num_points", cfg.num_points}};
  doc["separation"] = cfg.separation;
  doc["goal"]["gain"] = cfg.goal_gain;
  doc["goal"]["activation"] =
      cfg.activation == GoalActivation::always_on ? "always" : "threshold";
  if (cfg.goal_epsilon) doc["goal"]["epsilon"] = *cfg.goal_epsilon;
  doc["true_policy"] = cfg.true_policy;
  doc["nominal_policy"] = cfg.nominal_policy;
  doc["positions"]["initial"] = positions_to_json(cfg.initial, cfg.state_dim);
  doc["positions"]["goal"] = positions_to_json(cfg.goals, cfg.state_dim);
  doc["positions"]["seed"] = cfg.seed;
  doc["solver"] = {{"max_iter", cfg.solver.max_iter},
                   {"grad_tol", cfg.solver.grad_tol},
                   {"armijo",
                    {{"l0", cfg.solver.armijo.initial_step},
                     {"beta", cfg.solver.armijo.backtrack},
                     {"c", cfg.solver.armijo.sufficient_decrease},
                     {"max_backtracks", cfg.solver.armijo.max_backtracks}}}};
  doc["output_dir"] = cfg.output_dir;
  return doc;
}

void resolve_positions(ExperimentConfig& cfg) {
  if (!cfg.random_positions) {
    if (cfg.initial.size() != cfg.num_nodes * cfg.state_dim ||
        cfg.goals.size() != cfg.num_nodes * cfg.state_dim)
      fail("explicit positions have the wrong dimension");
    return;
  }
  std::mt19937_64 rng(cfg.seed);
  const int n = cfg.num_nodes * cfg.state_dim;
  cfg.initial.resize(n);
  cfg.goals.resize(n);
  for (int c = 0; c < n; ++c) cfg.initial(c) = uniform_from(rng, -2.0, 2.0);
  for (int c = 0; c < n; ++c) cfg.goals(c) = uniform_from(rng, -2.0, 2.0);
  cfg.random_positions = false;
}

PolicyGrid resolve_policy(const std::string& spec, const SGrid& grid, double separation) {
  const double d = separation;
  if (spec == "quadratic_3(s-d)^2")
    return sample_policy(grid, [d](double s) { return 3.0 * (s - d) * (s - d); });
  if (spec == "linear_3(s-d)")
    return sample_policy(grid, [d](double s) { return 3.0 * (s - d); });
  if (spec.rfind("constant:", 0) == 0) {
    double c = 0.0;
    try {
      c = std::stod(spec.substr(9));
    } catch (const std::exception&) {
      fail("bad constant policy spec '" + spec + "'");
    }
    return sample_policy(grid, [c](double) { return c; });
  }
  if (spec.rfind("csv:", 0) == 0) {
    const PolicyGrid file = io::read_policy_csv(spec.substr(4));
    return sample_policy(grid, [&file](double s) { return eval_policy(file, s); });
  }
  fail("unknown policy spec '" + spec + "'");
}

Graph config_graph(const ExperimentConfig& cfg) {
  return build_graph(cfg.num_nodes, cfg.edges, cfg.state_dim);
}

SGrid config_sgrid(const ExperimentConfig& cfg) {
  return make_sgrid(cfg.delta, cfg.Delta, cfg.num_points);
}

GoalSpec config_goal_spec(const ExperimentConfig& cfg) {
  GoalSpec spec;
  spec.goals = cfg.goals;
  spec.gain_k = cfg.goal_gain;
  if (cfg.goal_epsilon) spec.epsilon = *cfg.goal_epsilon;
  spec.activation = cfg.activation;
  return spec;
}

}  // namespace iwl
