#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "iwl/graph.hpp"
#include "test_support.hpp"

using iwl::Graph;
using iwl::build_graph;
using iwl::in_laplacian;
using iwl::incidence;

namespace {

const std::vector<std::pair<int, int>> kCaseStudyEdges = {
    {1, 3}, {2, 5}, {3, 8}, {4, 5}, {4, 6}, {6, 7}, {7, 8}};

Graph random_graph(std::mt19937& rng, int max_nodes = 6, int max_edges = 10) {
  std::uniform_int_distribution<int> nodes(2, max_nodes);
  const int n = nodes(rng);
  std::uniform_int_distribution<int> pick(1, n);
  std::set<std::pair<int, int>> edges;
  std::uniform_int_distribution<int> count(0, max_edges);
  const int want = count(rng);
  while (static_cast<int>(edges.size()) < want) {
    const int j = pick(rng);
    const int i = pick(rng);
    if (j != i) edges.insert({j, i});
    if (static_cast<int>(edges.size()) >= n * (n - 1)) break;
  }
  return build_graph(n, {edges.begin(), edges.end()}, 1);
}

// Entry-by-entry Laplacian assembly straight from the edge list.
Eigen::MatrixXd laplacian_oracle(const Graph& g, const Eigen::VectorXd& w) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.num_nodes, g.num_nodes);
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto [j, i] = g.edges[k];
    lap(i - 1, i - 1) += w(k);
    lap(i - 1, j - 1) -= w(k);
  }
  return lap;
}

}  // namespace

TEST_CASE("build_graph accepts the case-study topology") {
  const Graph g = build_graph(8, kCaseStudyEdges, 2);
  CHECK(g.num_edges() == 7);
  CHECK(g.ensemble_dim() == 16);
  CHECK(g.edges == kCaseStudyEdges);  // ordering preserved
}

TEST_CASE("build_graph accepts an empty edge set") {
  const Graph g = build_graph(3, {}, 1);
  CHECK(g.num_edges() == 0);
}

TEST_CASE("build_graph rejects invalid edge lists") {
  CHECK_THROWS_AS(build_graph(2, {{1, 1}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(2, {{1, 3}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(2, {{0, 2}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(3, {{1, 2}, {1, 2}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(0, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(3, {}, 0), std::invalid_argument);
}

TEST_CASE("incidence matches the two-edge path example") {
  const Graph g = build_graph(3, {{1, 2}, {2, 3}}, 1);
  const iwl::IncidenceSet inc = incidence(g);

  Eigen::MatrixXd d(3, 2), din(3, 2), dout(3, 2);
  d << -1, 0, 1, -1, 0, 1;
  din << 0, 0, 1, 0, 0, 1;
  dout << 1, 0, 0, 1, 0, 0;
  CHECK(test_support::exact_equal(inc.D, d));
  CHECK(test_support::exact_equal(inc.D_in, din));
  CHECK(test_support::exact_equal(inc.D_out, dout));
}

TEST_CASE("incidence of the case-study edge set puts edge 1 into row 3") {
  const iwl::IncidenceSet inc = incidence(build_graph(8, kCaseStudyEdges, 2));
  CHECK(inc.D_in(2, 0) == 1.0);  // edge (1,3): head node 3
  CHECK(inc.D_in.col(0).sum() == 1.0);
  CHECK(inc.D_out(0, 0) == 1.0);
}

TEST_CASE("incidence invariants hold on random graphs") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = random_graph(rng);
    const iwl::IncidenceSet inc = incidence(g);
    CHECK(test_support::exact_equal(inc.D, Eigen::MatrixXd(inc.D_in - inc.D_out)));
    for (int k = 0; k < g.num_edges(); ++k) {
      CHECK(inc.D.col(k).sum() == 0.0);  // one +1 and one -1
      CHECK(inc.D_in.col(k).sum() == 1.0);
      CHECK(inc.D_out.col(k).sum() == 1.0);
      CHECK(inc.D.col(k).cwiseAbs().sum() == 2.0);
    }
  }
}

TEST_CASE("in_laplacian with zero weights is the zero matrix") {
  const Graph g = build_graph(8, kCaseStudyEdges, 2);
  CHECK(in_laplacian(g, Eigen::VectorXd::Zero(7)).isZero(0.0));
}

TEST_CASE("in_laplacian single-edge expansion") {
  const Graph g = build_graph(2, {{1, 2}}, 1);
  Eigen::VectorXd w(1);
  w << 0.7;
  Eigen::MatrixXd expected(2, 2);
  expected << 0, 0, -0.7, 0.7;
  CHECK(test_support::exact_equal(in_laplacian(g, w), expected));
}

TEST_CASE("in_laplacian rejects a weight-length mismatch") {
  const Graph g = build_graph(3, {{1, 2}}, 1);
  CHECK_THROWS_AS(in_laplacian(g, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("in_laplacian matches the edge-loop oracle and has zero row sums") {
  std::mt19937 rng(2023);
  std::uniform_real_distribution<double> weight(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_graph(rng);
    Eigen::VectorXd w(g.num_edges());
    for (int k = 0; k < w.size(); ++k) w(k) = weight(rng);
    const Eigen::MatrixXd lap = in_laplacian(g, w);
    CHECK((lap - laplacian_oracle(g, w)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((lap * Eigen::VectorXd::Ones(g.num_nodes)).cwiseAbs().maxCoeff() <= 1e-13);
  }
}
