#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "iwl/graph.hpp"
#include "iwl/policy.hpp"

namespace iwl {

/// Whether the goal controller is applied unconditionally or gated by the
/// cubic-threshold branch ||x_goal - x_i||^3 < epsilon.
enum class GoalActivation { always_on, cubic_threshold };

/// Per-agent saturated proportional regulator toward fixed goal positions.
struct GoalSpec {
  Eigen::VectorXd goals;  // stacked d*N goal positions
  double gain_k = 1.0;
  double epsilon = std::numeric_limits<double>::infinity();
  GoalActivation activation = GoalActivation::always_on;
};

/// Soft-saturated regulator k*tanh(||x~||/k)*x~/||x~|| per agent, with the
/// removable limit 0 at x~ = 0. Magnitude is bounded by gain_k.
Eigen::VectorXd goal_control(const Eigen::VectorXd& x, const GoalSpec& spec, int state_dim);

/// Derivative of goal_control with respect to x: block diagonal, one d x d
/// block per agent. The analytic limit at x~ = 0 is -I. In cubic_threshold
/// mode the inactive branch returns -I per the controller's published form,
/// which is not the derivative of the zero branch; finite-difference checks
/// apply to the active branch.
Eigen::MatrixXd goal_control_jacobian(const Eigen::VectorXd& x, const GoalSpec& spec,
                                      int state_dim);

/// Ensemble drift h(x) - (L_in(w(alpha(x), u)) kron I_d) x, accumulated
/// edge-by-edge without materializing the Kronecker product.
Eigen::VectorXd drift(const Eigen::VectorXd& x, const PolicyGrid& p, const Graph& g,
                      const GoalSpec& spec);

/// Same drift through the dense weighted-Laplacian route (builds L_in and
/// applies it blockwise). Kept as an algebraic cross-check of the edge form.
Eigen::VectorXd drift_dense_laplacian(const Eigen::VectorXd& x, const PolicyGrid& p,
                                      const Graph& g, const GoalSpec& spec);

/// Same drift through the diagonal-interchange route
/// D_in_blk * (diag(D_blk^T x) (w kron 1_d)), materializing the block
/// incidence operators. Cross-check of the Hadamard identities.
Eigen::VectorXd drift_hadamard(const Eigen::VectorXd& x, const PolicyGrid& p, const Graph& g,
                               const GoalSpec& spec);

/// Scalar-state specialization D_in diag(D^T x) w; requires state_dim == 1.
Eigen::VectorXd drift_hadamard_1d(const Eigen::VectorXd& x, const PolicyGrid& p, const Graph& g,
                                  const GoalSpec& spec);

/// Time-indexed ensemble states on a uniform step.
struct Trajectory {
  double t0 = 0.0;
  double tf = 0.0;
  double dt = 1.0;
  std::vector<Eigen::VectorXd> states;

  int steps() const { return static_cast<int>(states.size()) - 1; }
  double time(int n) const { return t0 + n * dt; }
};

/// Number of uniform steps covering [t0, tf]; rejects dt <= 0 and horizons
/// that are not an integer multiple of dt (within 1e-9 of a step count).
int horizon_steps(double t0, double tf, double dt);

/// Fixed-step RK4 integration of the drift. Deterministic; throws
/// NumericError naming the failure time if the state becomes non-finite.
Trajectory simulate(const Eigen::VectorXd& x0, const PolicyGrid& p, const Graph& g,
                    const GoalSpec& spec, double t0, double tf, double dt);

}  // namespace iwl
