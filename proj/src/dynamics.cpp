#include "iwl/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "iwl/errors.hpp"

namespace iwl {

namespace {

constexpr double kDegenerateRadius = 1e-12;

void check_state(const Eigen::VectorXd& x, const GoalSpec& spec, int state_dim) {
  if (state_dim < 1) throw std::invalid_argument("goal_control: state_dim must be >= 1");
  if (x.size() % state_dim != 0 || x.size() != spec.goals.size())
    throw std::invalid_argument("goal_control: state/goal dimension mismatch");
  if (!(spec.gain_k > 0.0)) throw std::invalid_argument("goal_control: gain_k must be > 0");
  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("goal_control: epsilon must be > 0");
}

bool branch_active(double r, const GoalSpec& spec) {
  return spec.activation == GoalActivation::always_on || r * r * r < spec.epsilon;
}

// d x d Jacobian block of the active regulator with respect to the agent
// position (one chain-rule sign flip relative to the x~ form).
Eigen::MatrixXd active_block(const Eigen::VectorXd& xt, double k) {
  const int d = static_cast<int>(xt.size());
  const double r = xt.norm();
  if (r < kDegenerateRadius) return -Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd u = xt / r;
  const double sech = 1.0 / std::cosh(r / k);
  const double radial = sech * sech;          // d/dr of k*tanh(r/k)
  const double tangential = k * std::tanh(r / k) / r;
  Eigen::MatrixXd uu = u * u.transpose();
  return -(radial * uu + tangential * (Eigen::MatrixXd::Identity(d, d) - uu));
}

// Drift evaluation against a prebuilt integrator; used by simulate so the
// prefix sums are computed once per rollout.
Eigen::VectorXd drift_impl(const Eigen::VectorXd& x, const WeightIntegrator& wi, const Graph& g,
                           const GoalSpec& spec) {
  const int d = g.state_dim;
  Eigen::VectorXd v = goal_control(x, spec, d);
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto [j, i] = g.edges[k];
    const auto xi = x.segment((i - 1) * d, d);
    const auto xj = x.segment((j - 1) * d, d);
    const double w = wi.weight_at((xi - xj).norm());
    v.segment((i - 1) * d, d) += w * (xj - xi);
  }
  return v;
}

}  // namespace

Eigen::VectorXd goal_control(const Eigen::VectorXd& x, const GoalSpec& spec, int state_dim) {
  check_state(x, spec, state_dim);
  const int n = static_cast<int>(x.size()) / state_dim;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(x.size());
  for (int a = 0; a < n; ++a) {
    const Eigen::VectorXd xt =
        spec.goals.segment(a * state_dim, state_dim) - x.segment(a * state_dim, state_dim);
    const double r = xt.norm();
    if (!branch_active(r, spec) || r < kDegenerateRadius) continue;
    h.segment(a * state_dim, state_dim) = (spec.gain_k * std::tanh(r / spec.gain_k) / r) * xt;
  }
  return h;
}

Eigen::MatrixXd goal_control_jacobian(const Eigen::VectorXd& x, const GoalSpec& spec,
                                      int state_dim) {
  check_state(x, spec, state_dim);
  const int n = static_cast<int>(x.size()) / state_dim;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (int a = 0; a < n; ++a) {
    const Eigen::VectorXd xt =
        spec.goals.segment(a * state_dim, state_dim) - x.segment(a * state_dim, state_dim);
    jac.block(a * state_dim, a * state_dim, state_dim, state_dim) =
        branch_active(xt.norm(), spec)
            ? active_block(xt, spec.gain_k)
            : -Eigen::MatrixXd::Identity(state_dim, state_dim);
  }
  return jac;
}

Eigen::VectorXd drift(const Eigen::VectorXd& x, const PolicyGrid& p, const Graph& g,
                      const GoalSpec& spec) {
  return drift_impl(x, WeightIntegrator(p), g, spec);
}

Eigen::VectorXd drift_dense_laplacian(const Eigen::VectorXd& x, const PolicyGrid& p,
                                      const Graph& g, const GoalSpec& spec) {
  const int d = g.state_dim;
  const Eigen::MatrixXd lap = in_laplacian(g, edge_weights(p, x, g));
  Eigen::VectorXd v = goal_control(x, spec, d);
  for (int i = 0; i < g.num_nodes; ++i)
    for (int j = 0; j < g.num_nodes; ++j)
      if (lap(i, j) != 0.0) v.segment(i * d, d) -= lap(i, j) * x.segment(j * d, d);
  return v;
}

Eigen::VectorXd drift_hadamard(const Eigen::VectorXd& x, const PolicyGrid& p, const Graph& g,
                               const GoalSpec& spec) {
  const int d = g.state_dim;
  const int m = g.num_edges();
  const IncidenceSet inc = incidence(g);

  // Block operators D kron I_d and D_in kron I_d, materialized; this route
  // exists as a cross-check, not a fast path.
  Eigen::MatrixXd d_blk = Eigen::MatrixXd::Zero(g.ensemble_dim(), m * d);
  Eigen::MatrixXd din_blk = Eigen::MatrixXd::Zero(g.ensemble_dim(), m * d);
  for (int i = 0; i < g.num_nodes; ++i)
    for (int k = 0; k < m; ++k)
      for (int c = 0; c < d; ++c) {
        d_blk(i * d + c, k * d + c) = inc.D(i, k);
        din_blk(i * d + c, k * d + c) = inc.D_in(i, k);
      }

  const Eigen::VectorXd z = d_blk.transpose() * x;  // per-edge difference x_i - x_j
  const Eigen::VectorXd w = edge_weights(p, x, g);
  Eigen::VectorXd w_rep(m * d);
  for (int k = 0; k < m; ++k) w_rep.segment(k * d, d).setConstant(w(k));

  return goal_control(x, spec, d) - din_blk * z.cwiseProduct(w_rep);
}

Eigen::VectorXd drift_hadamard_1d(const Eigen::VectorXd& x, const PolicyGrid& p, const Graph& g,
                                  const GoalSpec& spec) {
  if (g.state_dim != 1)
    throw std::invalid_argument("drift_hadamard_1d: requires state_dim == 1");
  const IncidenceSet inc = incidence(g);
  const Eigen::VectorXd z = inc.D.transpose() * x;
  const Eigen::VectorXd w = edge_weights(p, x, g);
  return goal_control(x, spec, 1) - inc.D_in * z.cwiseProduct(w);
}

int horizon_steps(double t0, double tf, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("horizon: dt must be > 0");
  if (tf < t0) throw std::invalid_argument("horizon: tf must be >= t0");
  const double ratio = (tf - t0) / dt;
  const long long n = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9)
    throw std::invalid_argument("horizon: (tf - t0)/dt = " + std::to_string(ratio) +
                                " is not an integer step count");
  return static_cast<int>(n);
}

Trajectory simulate(const Eigen::VectorXd& x0, const PolicyGrid& p, const Graph& g,
                    const GoalSpec& spec, double t0, double tf, double dt) {
  const int n = horizon_steps(t0, tf, dt);
  if (x0.size() != g.ensemble_dim())
    throw std::invalid_argument("simulate: initial state has wrong dimension");

  const WeightIntegrator wi(p);
  Trajectory traj{t0, tf, dt, {}};
  traj.states.reserve(n + 1);
  traj.states.push_back(x0);

  Eigen::VectorXd x = x0;
  for (int step = 0; step < n; ++step) {
    const Eigen::VectorXd k1 = drift_impl(x, wi, g, spec);
    const Eigen::VectorXd k2 = drift_impl(x + 0.5 * dt * k1, wi, g, spec);
    const Eigen::VectorXd k3 = drift_impl(x + 0.5 * dt * k2, wi, g, spec);
    const Eigen::VectorXd k4 = drift_impl(x + dt * k3, wi, g, spec);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite())
      throw NumericError("simulate: state became non-finite at t = " +
                         std::to_string(t0 + (step + 1) * dt));
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace iwl
