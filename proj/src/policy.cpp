#include "iwl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iwl {

namespace {

// Index q in [0, num_points-2] with node(q) <= s, and node(q+1) > s unless s
// sits on the last node. Works on the snapped node values so cell selection
// is consistent everywhere.
int cell_index(const SGrid& grid, double s) {
  const int last = grid.num_points - 2;
  int q = static_cast<int>((s - grid.delta) / grid.spacing());
  q = std::clamp(q, 0, last);
  while (q < last && grid.node(q + 1) <= s) ++q;
  while (q > 0 && grid.node(q) > s) --q;
  return q;
}

double interp_in_cell(const PolicyGrid& p, int q, double s) {
  const double s0 = p.grid.node(q);
  const double s1 = p.grid.node(q + 1);
  const double t = (s - s0) / (s1 - s0);
  return p.values(q) + t * (p.values(q + 1) - p.values(q));
}

void check_policy(const PolicyGrid& p) {
  if (p.values.size() != p.grid.num_points)
    throw std::invalid_argument("policy: values length " + std::to_string(p.values.size()) +
                                " != grid num_points " + std::to_string(p.grid.num_points));
}

}  // namespace

Eigen::VectorXd SGrid::nodes() const {
  Eigen::VectorXd out(num_points);
  for (int q = 0; q < num_points; ++q) out(q) = node(q);
  return out;
}

SGrid make_sgrid(double delta, double Delta, int num_points) {
  if (!(delta >= 0.0) || !(Delta > delta) || !std::isfinite(Delta))
    throw std::invalid_argument("sgrid: need 0 <= delta < Delta < inf");
  if (num_points < 2) throw std::invalid_argument("sgrid: need num_points >= 2");
  return SGrid{delta, Delta, num_points};
}

PolicyGrid sample_policy(const SGrid& grid, const std::function<double(double)>& fn) {
  PolicyGrid p{grid, Eigen::VectorXd(grid.num_points)};
  for (int q = 0; q < grid.num_points; ++q) p.values(q) = fn(grid.node(q));
  return p;
}

double eval_policy(const PolicyGrid& p, double s) {
  check_policy(p);
  if (s <= p.grid.delta) return p.values(0);
  if (s >= p.grid.Delta) return p.values(p.grid.num_points - 1);
  const int q = cell_index(p.grid, s);
  if (s == p.grid.node(q)) return p.values(q);
  return interp_in_cell(p, q, s);
}

double policy_weight(const PolicyGrid& p, double alpha) {
  check_policy(p);
  if (!(alpha >= 0.0))
    throw std::invalid_argument("policy_weight: alpha must be >= 0, got " + std::to_string(alpha));
  if (alpha <= p.grid.delta) return 0.0;
  const double a = std::min(alpha, p.grid.Delta);
  const int last = p.grid.num_points - 1;

  double acc = 0.0;
  int q = 0;
  while (q < last && p.grid.node(q + 1) <= a) {
    acc += 0.5 * (p.values(q) + p.values(q + 1)) * (p.grid.node(q + 1) - p.grid.node(q));
    ++q;
  }
  if (q < last && a > p.grid.node(q))
    acc += 0.5 * (p.values(q) + interp_in_cell(p, q, a)) * (a - p.grid.node(q));
  return acc;
}

double policy_weight_slope(const PolicyGrid& p, double alpha) {
  if (alpha < p.grid.delta || alpha > p.grid.Delta) return 0.0;
  return eval_policy(p, alpha);
}

WeightIntegrator::WeightIntegrator(const PolicyGrid& p) {
  check_policy(p);
  nodes_ = p.grid.nodes();
  values_ = p.values;
  prefix_.resize(nodes_.size());
  prefix_(0) = 0.0;
  // Same left-to-right accumulation as policy_weight, so lookups match it
  // bitwise.
  for (int q = 0; q + 1 < nodes_.size(); ++q)
    prefix_(q + 1) = prefix_(q) + 0.5 * (values_(q) + values_(q + 1)) * (nodes_(q + 1) - nodes_(q));
}

double WeightIntegrator::weight_at(double alpha) const {
  if (!(alpha >= 0.0))
    throw std::invalid_argument("weight_at: alpha must be >= 0, got " + std::to_string(alpha));
  const double delta = nodes_(0);
  const double Delta = nodes_(nodes_.size() - 1);
  if (alpha <= delta) return 0.0;
  const double a = std::min(alpha, Delta);

  // Last node <= a; the prefix up to it covers exactly the cells the naive
  // loop would sum.
  const double* begin = nodes_.data();
  const double* end = begin + nodes_.size();
  int q = static_cast<int>(std::upper_bound(begin, end, a) - begin) - 1;
  q = std::clamp(q, 0, static_cast<int>(nodes_.size()) - 1);

  double acc = prefix_(q);
  if (q < nodes_.size() - 1 && a > nodes_(q)) {
    const double t = (a - nodes_(q)) / (nodes_(q + 1) - nodes_(q));
    const double ua = values_(q) + t * (values_(q + 1) - values_(q));
    acc += 0.5 * (values_(q) + ua) * (a - nodes_(q));
  }
  return acc;
}

double WeightIntegrator::slope_at(double alpha) const {
  const double delta = nodes_(0);
  const double Delta = nodes_(nodes_.size() - 1);
  if (alpha < delta || alpha > Delta) return 0.0;
  if (alpha <= delta) return values_(0);
  if (alpha >= Delta) return values_(nodes_.size() - 1);
  const double* begin = nodes_.data();
  const double* end = begin + nodes_.size();
  int q = static_cast<int>(std::upper_bound(begin, end, alpha) - begin) - 1;
  q = std::clamp(q, 0, static_cast<int>(nodes_.size()) - 2);
  if (alpha == nodes_(q)) return values_(q);
  const double t = (alpha - nodes_(q)) / (nodes_(q + 1) - nodes_(q));
  return values_(q) + t * (values_(q + 1) - values_(q));
}

Eigen::VectorXd edge_distances(const Eigen::VectorXd& x, const Graph& g) {
  if (x.size() != g.ensemble_dim())
    throw std::invalid_argument("edge_distances: state length " + std::to_string(x.size()) +
                                " != " + std::to_string(g.ensemble_dim()));
  const int d = g.state_dim;
  Eigen::VectorXd alpha(g.num_edges());
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto [j, i] = g.edges[k];
    alpha(k) = (x.segment((i - 1) * d, d) - x.segment((j - 1) * d, d)).norm();
  }
  return alpha;
}

Eigen::VectorXd edge_weights(const PolicyGrid& p, const Eigen::VectorXd& x, const Graph& g) {
  const Eigen::VectorXd alpha = edge_distances(x, g);
  const WeightIntegrator wi(p);
  Eigen::VectorXd w(alpha.size());
  for (int k = 0; k < alpha.size(); ++k) w(k) = wi.weight_at(alpha(k));
  return w;
}

}  // namespace iwl
