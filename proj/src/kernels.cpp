#include "iwl/kernels.hpp"

#include <stdexcept>

namespace iwl::kernels {

Exec default_exec() {
#ifdef _OPENMP
  return Exec::parallel;
#else
  return Exec::serial;
#endif
}

namespace {

// Dispatch a row loop either serially or via OpenMP. Each index is handled
// exactly once in both modes.
template <typename Fn>
void for_rows(int count, Exec exec, const Fn& fn) {
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < count; ++r) fn(r);
  } else {
    for (int r = 0; r < count; ++r) fn(r);
  }
}

}  // namespace

Eigen::MatrixXd distance_rows(const std::vector<Eigen::VectorXd>& states, const Graph& g,
                              Exec exec) {
  const int rows = static_cast<int>(states.size());
  const int m = g.num_edges();
  const int d = g.state_dim;
  // Validate up front: exceptions must not escape a parallel region.
  for (const auto& x : states)
    if (x.size() != g.ensemble_dim())
      throw std::invalid_argument("distance_rows: state dimension mismatch");
  Eigen::MatrixXd out(rows, m);
  for_rows(rows, exec, [&](int t) {
    const Eigen::VectorXd& x = states[t];
    for (int k = 0; k < m; ++k) {
      const auto [j, i] = g.edges[k];
      out(t, k) = (x.segment((i - 1) * d, d) - x.segment((j - 1) * d, d)).norm();
    }
  });
  return out;
}

Eigen::MatrixXd weight_rows(const PolicyGrid& p, const Eigen::MatrixXd& distances, Exec exec) {
  const WeightIntegrator wi(p);
  if (distances.size() > 0 && !(distances.minCoeff() >= 0.0))
    throw std::invalid_argument("weight_rows: distances must be non-negative");
  Eigen::MatrixXd out(distances.rows(), distances.cols());
  for_rows(static_cast<int>(distances.rows()), exec, [&](int t) {
    for (int k = 0; k < distances.cols(); ++k) out(t, k) = wi.weight_at(distances(t, k));
  });
  return out;
}

Eigen::VectorXd masked_time_integral(const Eigen::VectorXd& s_nodes,
                                     const Eigen::MatrixXd& distances,
                                     const Eigen::MatrixXd& coefficients,
                                     const Eigen::VectorXd& time_weights, Exec exec) {
  if (distances.rows() != coefficients.rows() || distances.cols() != coefficients.cols() ||
      distances.rows() != time_weights.size())
    throw std::invalid_argument("masked_time_integral: shape mismatch");

  Eigen::VectorXd out(s_nodes.size());
  for_rows(static_cast<int>(s_nodes.size()), exec, [&](int q) {
    const double s = s_nodes(q);
    double acc = 0.0;
    for (int t = 0; t < distances.rows(); ++t) {
      double row = 0.0;
      for (int k = 0; k < distances.cols(); ++k)
        if (s < distances(t, k)) row += coefficients(t, k);
      acc += time_weights(t) * row;
    }
    out(q) = acc;
  });
  return out;
}

}  // namespace iwl::kernels
