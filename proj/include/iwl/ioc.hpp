#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "iwl/dynamics.hpp"
#include "iwl/graph.hpp"
#include "iwl/policy.hpp"

namespace iwl {

/// Inverse problem instance: recover the interaction policy that explains a
/// demonstration trajectory. The nominal policy defines both the regularizer
/// center and the s-grid every candidate policy lives on; the integrator grid
/// is the demonstration's.
struct IocProblem {
  Graph graph;
  Trajectory demo;
  GoalSpec goal_spec;
  PolicyGrid nominal;

  const SGrid& grid() const { return nominal.grid; }
};

/// Validates dimensions and grid consistency; throws std::invalid_argument.
IocProblem make_problem(Graph graph, Trajectory demo, GoalSpec goal_spec, PolicyGrid nominal);

/// Co-state (adjoint multiplier) samples on the demonstration time grid.
struct CostateTrajectory {
  std::vector<Eigen::VectorXd> lambdas;
};

enum class Termination { gradient_tol, max_iter, line_search_fail };

std::string to_string(Termination t);

/// Outcome of the learning loop. cost_history / grad_norm_history carry one
/// entry per visited policy (iterations + 1 entries); the Armijo rule keeps
/// cost_history non-increasing.
struct SolveReport {
  PolicyGrid learned;
  std::vector<double> cost_history;
  std::vector<double> grad_norm_history;
  int iterations = 0;
  Termination termination = Termination::max_iter;
};

struct ArmijoParams {
  double initial_step = 1.0;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 40;
};

struct SolverSettings {
  int max_iter = 500;
  double grad_tol = 1e-6;
  ArmijoParams armijo;
};

/// Trapezoid weights for the s-grid (h/2 at the ends, h inside).
Eigen::VectorXd grid_quadrature_weights(const SGrid& grid);

/// ds-weighted squared L2 norm of a grid function.
double grid_norm_sq(const SGrid& grid, const Eigen::VectorXd& v);

/// Tracking + regularization + terminal cost of the forward simulation under
/// p started from the demonstration's initial state:
///   integral of 0.5*||x - x_hat||^2 dt  (trapezoid in t)
/// + integral of 0.5*(u - u_o)^2 ds      (trapezoid in s)
/// + 0.5*||x(tf) - x_hat(tf)||^2.
double total_cost(const IocProblem& prob, const PolicyGrid& p);

/// Same cost evaluated against an existing rollout of p (skips the
/// simulation).
double total_cost_with(const IocProblem& prob, const PolicyGrid& p, const Trajectory& fwd);

/// Right-hand side of the co-state equation,
///   lambda_dot = (x - x_hat) - (dh/dx)^T lambda + (L_in kron I_d)^T lambda
///              + sum_k W'(alpha_k) * (lambda_i . (x_i - x_j)) * d(alpha_k)/dx,
/// the adjoint of the drift against the tracking cost. W'(alpha) vanishes
/// outside [delta, Delta] where the weight saturates.
Eigen::VectorXd costate_rhs(const Eigen::VectorXd& lambda, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_hat, const PolicyGrid& p, const Graph& g,
                            const GoalSpec& spec);

/// m x (d*N) Jacobian of the edge distances: row k carries +/- the unit
/// direction (x_i - x_j)/alpha_k in blocks i and j. Edges with alpha below
/// 1e-9 get a zero row (subgradient choice); their count is reported through
/// degenerate_count when given.
Eigen::MatrixXd distance_jacobian(const Eigen::VectorXd& x, const Graph& g,
                                  int* degenerate_count = nullptr);

/// RK4 integration of the co-state equation backward from
/// lambda(tf) = -(x(tf) - x_hat(tf)), interpolating stored states linearly at
/// the half steps.
CostateTrajectory backward_pass(const IocProblem& prob, const PolicyGrid& p,
                                const Trajectory& fwd);

/// Gradient density of total_cost with respect to the policy node values:
///   g(s_q) = u(s_q) - u_o(s_q)
///          + integral over t of sum_k lambda_i.(x_i - x_j) [s_q < alpha_k].
/// Pairs with grid_quadrature_weights for directional derivatives.
Eigen::VectorXd policy_gradient(const IocProblem& prob, const PolicyGrid& p,
                                const Trajectory& fwd, const CostateTrajectory& cst);

struct ArmijoResult {
  double step = 0.0;
  PolicyGrid next;
  double cost_next = 0.0;
  bool success = false;
  int backtracks = 0;
};

/// Backtracking line search along `direction` (the negative gradient):
/// accepts the largest step l0*beta^n with
///   J(u + l*dir) <= J(u) - c*l*grad_norm_sq.
/// A zero direction short-circuits and leaves the policy unchanged.
ArmijoResult armijo_step(const IocProblem& prob, const PolicyGrid& p,
                         const Eigen::VectorXd& direction, double cost_current,
                         double grad_norm_squared, const ArmijoParams& params = {});

/// Full learning loop: forward rollout, backward co-state pass, gradient,
/// Armijo update, until the ds-weighted gradient norm drops to grad_tol or
/// max_iter updates were taken. Returns the best (last accepted) policy also
/// when the line search fails.
SolveReport learn(const IocProblem& prob, const PolicyGrid& u_init, const SolverSettings& settings);

/// Minimum over grid nodes of the second derivative of the Hamiltonian
/// density with respect to the policy value, evaluated by exact second
/// differences. The dynamics are linear in u, so this is the regularizer
/// curvature 1/(tf - t0) regardless of the policy.
double hamiltonian_curvature(const IocProblem& prob, const PolicyGrid& p);

}  // namespace iwl
