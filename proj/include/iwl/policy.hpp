#pragma once

#include <Eigen/Dense>
#include <functional>

#include "iwl/graph.hpp"

namespace iwl {

/// Uniform grid of num_points nodes spanning [delta, Delta], the support of
/// the interaction policy. Endpoint nodes are exact; interior nodes are
/// delta + q * spacing().
struct SGrid {
  double delta = 0.0;
  double Delta = 1.0;
  int num_points = 2;

  double spacing() const { return (Delta - delta) / (num_points - 1); }
  double node(int q) const {
    if (q <= 0) return delta;
    if (q >= num_points - 1) return Delta;
    return delta + q * spacing();
  }
  Eigen::VectorXd nodes() const;
};

/// Validates 0 <= delta < Delta and num_points >= 2.
SGrid make_sgrid(double delta, double Delta, int num_points);

/// Scalar interaction policy u(s), stored as node values on an SGrid and
/// interpreted as continuous piecewise-linear between nodes.
struct PolicyGrid {
  SGrid grid;
  Eigen::VectorXd values;
};

/// Samples fn at the grid nodes.
PolicyGrid sample_policy(const SGrid& grid, const std::function<double(double)>& fn);

/// Piecewise-linear evaluation; constant extrapolation outside [delta, Delta].
/// Exact at grid nodes.
double eval_policy(const PolicyGrid& p, double s);

/// Edge weight from the running integral of the policy:
///   W(alpha) = integral of u(s) ds over [delta, min(alpha, Delta)],
/// zero for alpha <= delta. Composite trapezoid over full cells plus an exact
/// partial-cell term, so the result is exact for the piecewise-linear
/// representation. Rejects negative alpha.
double policy_weight(const PolicyGrid& p, double alpha);

/// dW/dalpha: the policy value at alpha inside [delta, Delta], zero outside
/// (the weight saturates at Delta and vanishes below delta).
double policy_weight_slope(const PolicyGrid& p, double alpha);

/// Precomputed prefix integrals for O(1) weight lookups against a frozen
/// policy. Produces bitwise-identical results to policy_weight /
/// policy_weight_slope; read-only after construction, safe to share across
/// threads.
class WeightIntegrator {
 public:
  explicit WeightIntegrator(const PolicyGrid& p);

  double weight_at(double alpha) const;
  double slope_at(double alpha) const;
  double full_integral() const { return prefix_(prefix_.size() - 1); }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd values_;
  Eigen::VectorXd prefix_;
};

/// Per-edge Euclidean distances ||x_i - x_j|| in edge-list order.
Eigen::VectorXd edge_distances(const Eigen::VectorXd& x, const Graph& g);

/// Per-edge weights W(alpha_k(x)) in edge-list order.
Eigen::VectorXd edge_weights(const PolicyGrid& p, const Eigen::VectorXd& x, const Graph& g);

}  // namespace iwl
