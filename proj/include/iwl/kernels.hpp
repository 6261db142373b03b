#pragma once

#include <Eigen/Dense>
#include <vector>

#include "iwl/graph.hpp"
#include "iwl/policy.hpp"

namespace iwl::kernels {

/// Execution mode for the batch kernels. Every output element is computed by
/// exactly one iteration running the same scalar code in both modes, so
/// serial and parallel results are bitwise identical; parallel only changes
/// wall-clock time. The serial variant is the reference the tests compare
/// against.
enum class Exec { serial, parallel };

/// parallel when built with OpenMP, serial otherwise.
Exec default_exec();

/// Row t = edge distances alpha(x_t); one row per state.
Eigen::MatrixXd distance_rows(const std::vector<Eigen::VectorXd>& states, const Graph& g,
                              Exec exec = default_exec());

/// Elementwise W(alpha) over a matrix of distances.
Eigen::MatrixXd weight_rows(const PolicyGrid& p, const Eigen::MatrixXd& distances,
                            Exec exec = default_exec());

/// For each node value s_q:
///   out(q) = sum_t time_weights(t) * sum_k coefficients(t, k) * [s_q < distances(t, k)]
/// The indicator-masked time integral behind the policy gradient; parallel
/// over grid nodes.
Eigen::VectorXd masked_time_integral(const Eigen::VectorXd& s_nodes,
                                     const Eigen::MatrixXd& distances,
                                     const Eigen::MatrixXd& coefficients,
                                     const Eigen::VectorXd& time_weights,
                                     Exec exec = default_exec());

}  // namespace iwl::kernels
