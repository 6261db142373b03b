#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace iwl {

/// Fixed directed interaction topology. Edge k = (j, i) means "agent j
/// influences agent i"; node indices are 1-based and the edge-list order
/// defines the edge index used by every weight vector and matrix column
/// downstream.
struct Graph {
  int num_nodes = 0;
  int state_dim = 1;
  std::vector<std::pair<int, int>> edges;

  int num_edges() const { return static_cast<int>(edges.size()); }
  int ensemble_dim() const { return num_nodes * state_dim; }
};

/// Signed incidence matrix D plus the in/out selector matrices,
/// with D = D_in - D_out. All are num_nodes x num_edges.
struct IncidenceSet {
  Eigen::MatrixXd D;
  Eigen::MatrixXd D_in;
  Eigen::MatrixXd D_out;
};

/// Validates and returns a Graph. Throws std::invalid_argument on
/// out-of-range node indices, self-loops, or duplicate edges.
Graph build_graph(int num_nodes, std::vector<std::pair<int, int>> edges, int state_dim);

IncidenceSet incidence(const Graph& g);

/// Weighted in-Laplacian D_in * diag(w) * D^T. Rows sum to zero.
Eigen::MatrixXd in_laplacian(const Graph& g, const Eigen::VectorXd& w);

}  // namespace iwl
