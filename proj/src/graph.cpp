#include "iwl/graph.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace iwl {

Graph build_graph(int num_nodes, std::vector<std::pair<int, int>> edges, int state_dim) {
  if (num_nodes < 1) throw std::invalid_argument("graph: num_nodes must be >= 1");
  if (state_dim < 1) throw std::invalid_argument("graph: state_dim must be >= 1");

  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [j, i] = edges[k];
    if (j < 1 || j > num_nodes || i < 1 || i > num_nodes)
      throw std::invalid_argument("graph: edge " + std::to_string(k + 1) +
                                  " has node index outside 1.." + std::to_string(num_nodes));
    if (j == i)
      throw std::invalid_argument("graph: edge " + std::to_string(k + 1) + " is a self-loop");
    if (!seen.insert(edges[k]).second)
      throw std::invalid_argument("graph: duplicate edge (" + std::to_string(j) + "," +
                                  std::to_string(i) + ")");
  }

  Graph g;
  g.num_nodes = num_nodes;
  g.state_dim = state_dim;
  g.edges = std::move(edges);
  return g;
}

IncidenceSet incidence(const Graph& g) {
  const int n = g.num_nodes;
  const int m = g.num_edges();
  IncidenceSet inc;
  inc.D_in = Eigen::MatrixXd::Zero(n, m);
  inc.D_out = Eigen::MatrixXd::Zero(n, m);
  for (int k = 0; k < m; ++k) {
    const auto [j, i] = g.edges[k];
    inc.D_in(i - 1, k) = 1.0;
    inc.D_out(j - 1, k) = 1.0;
  }
  inc.D = inc.D_in - inc.D_out;
  return inc;
}

Eigen::MatrixXd in_laplacian(const Graph& g, const Eigen::VectorXd& w) {
  if (w.size() != g.num_edges())
    throw std::invalid_argument("in_laplacian: weight vector length " + std::to_string(w.size()) +
                                " != number of edges " + std::to_string(g.num_edges()));
  const IncidenceSet inc = incidence(g);
  return inc.D_in * w.asDiagonal() * inc.D.transpose();
}

}  // namespace iwl
