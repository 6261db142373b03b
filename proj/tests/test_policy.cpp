#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iwl/policy.hpp"
#include "test_support.hpp"

using iwl::PolicyGrid;
using iwl::SGrid;
using iwl::WeightIntegrator;
using iwl::edge_distances;
using iwl::edge_weights;
using iwl::eval_policy;
using iwl::make_sgrid;
using iwl::policy_weight;
using iwl::policy_weight_slope;
using iwl::sample_policy;

namespace {

constexpr double kSep = 0.3;

double quadratic_truth(double s) { return 3.0 * (s - kSep) * (s - kSep); }

// Closed-form integral of the quadratic truth from delta to alpha.
double quadratic_weight_oracle(double delta, double alpha) {
  const auto anti = [](double s) { return std::pow(s - kSep, 3); };
  return anti(alpha) - anti(delta);
}

PolicyGrid case_study_policy(int num_points = 288) {
  return sample_policy(make_sgrid(0.15, 3.02, num_points), quadratic_truth);
}

}  // namespace

TEST_CASE("make_sgrid validates its support") {
  CHECK_THROWS_AS(make_sgrid(-0.1, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_sgrid(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_sgrid(0.0, 1.0, 1), std::invalid_argument);
  const SGrid grid = make_sgrid(0.15, 3.02, 288);
  CHECK(grid.node(0) == 0.15);
  CHECK(grid.node(287) == 3.02);
  CHECK(grid.spacing() == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("eval_policy of a constant is that constant") {
  const PolicyGrid p = sample_policy(make_sgrid(0.5, 2.0, 16), [](double) { return 4.25; });
  for (const double s : {-1.0, 0.5, 0.77, 1.3, 2.0, 9.0}) CHECK(eval_policy(p, s) == 4.25);
}

TEST_CASE("eval_policy hits the case-study value at s = 1") {
  const PolicyGrid p = case_study_policy();
  // h^2 * max|u''| / 8 with h = 0.01 and u'' = 6
  CHECK(std::abs(eval_policy(p, 1.0) - 1.47) <= 7.5e-5);
}

TEST_CASE("eval_policy is exact at grid nodes and constant outside the support") {
  const PolicyGrid p = case_study_policy(57);
  for (int q = 0; q < p.grid.num_points; ++q)
    CHECK(eval_policy(p, p.grid.node(q)) == p.values(q));
  CHECK(eval_policy(p, 0.0) == p.values(0));
  CHECK(eval_policy(p, p.grid.delta) == p.values(0));
  CHECK(eval_policy(p, 5.0) == p.values(p.grid.num_points - 1));
}

TEST_CASE("policy_weight of a constant integrand is exact") {
  const double c = 1.75;
  const PolicyGrid p = sample_policy(make_sgrid(0.2, 2.2, 21), [c](double) { return c; });
  for (const double alpha : {0.2, 0.3, 0.9473, 1.5, 2.2})
    CHECK(policy_weight(p, alpha) == doctest::Approx(c * (alpha - 0.2)).epsilon(1e-13));
}

TEST_CASE("policy_weight matches the cubic antiderivative on the case study") {
  const PolicyGrid p = case_study_policy();
  const double expected = quadratic_weight_oracle(0.15, 1.0);
  CHECK(expected == doctest::Approx(0.346375).epsilon(1e-12));
  CHECK(std::abs(policy_weight(p, 1.0) - expected) <= 1e-4);
}

TEST_CASE("policy_weight boundary behavior") {
  const PolicyGrid p = case_study_policy();
  CHECK(policy_weight(p, p.grid.delta) == 0.0);
  CHECK(policy_weight(p, 0.0) == 0.0);
  CHECK(policy_weight(p, 4.0) == policy_weight(p, p.grid.Delta));  // saturation
  CHECK_THROWS_AS(policy_weight(p, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(policy_weight(p, std::nan("")), std::invalid_argument);
}

TEST_CASE("policy_weight is non-decreasing for a non-negative policy") {
  const PolicyGrid p = case_study_policy(64);
  double prev = 0.0;
  for (double alpha = 0.0; alpha <= 3.6; alpha += 0.03) {
    const double w = policy_weight(p, alpha);
    CHECK(w >= prev);
    prev = w;
  }
}

TEST_CASE("policy_weight is linear in the policy") {
  const SGrid grid = make_sgrid(0.1, 2.0, 33);
  const PolicyGrid p1 = sample_policy(grid, [](double s) { return std::sin(3.0 * s); });
  const PolicyGrid p2 = sample_policy(grid, [](double s) { return s * s - 0.5; });
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> alpha_dist(0.0, 2.5);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = coef(rng), b = coef(rng), alpha = alpha_dist(rng);
    const PolicyGrid mix{grid, a * p1.values + b * p2.values};
    const double direct = policy_weight(mix, alpha);
    const double composed = a * policy_weight(p1, alpha) + b * policy_weight(p2, alpha);
    CHECK(std::abs(direct - composed) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("policy_weight quadrature error halves at second order") {
  const double alpha = 2.0;
  const double exact = quadratic_weight_oracle(0.15, alpha);
  const double err_coarse = std::abs(policy_weight(case_study_policy(73), alpha) - exact);
  const double err_fine = std::abs(policy_weight(case_study_policy(145), alpha) - exact);
  CHECK(err_coarse / err_fine >= 3.5);
}

TEST_CASE("WeightIntegrator reproduces policy_weight and the slope bitwise") {
  const PolicyGrid p = case_study_policy(91);
  const WeightIntegrator wi(p);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> alpha_dist(0.0, 3.6);
  for (int trial = 0; trial < 500; ++trial) {
    const double alpha = alpha_dist(rng);
    CHECK(wi.weight_at(alpha) == policy_weight(p, alpha));
    CHECK(wi.slope_at(alpha) == policy_weight_slope(p, alpha));
  }
  for (int q = 0; q < p.grid.num_points; ++q) {
    const double s = p.grid.node(q);
    CHECK(wi.weight_at(s) == policy_weight(p, s));
    CHECK(wi.slope_at(s) == policy_weight_slope(p, s));
  }
}

TEST_CASE("policy_weight_slope vanishes where the weight saturates") {
  const PolicyGrid p = case_study_policy(64);
  CHECK(policy_weight_slope(p, 0.05) == 0.0);
  CHECK(policy_weight_slope(p, 3.4) == 0.0);
  CHECK(policy_weight_slope(p, 1.0) == doctest::Approx(1.47).epsilon(1e-3));
}

TEST_CASE("edge_distances handles the 3-4-5 triangle and coincident agents") {
  const iwl::Graph g = iwl::build_graph(2, {{1, 2}}, 2);
  Eigen::VectorXd x(4);
  x << 0.0, 0.0, 3.0, 4.0;
  CHECK(edge_distances(x, g)(0) == 5.0);
  CHECK(edge_distances(Eigen::VectorXd::Zero(4), g)(0) == 0.0);
  CHECK_THROWS_AS(edge_distances(Eigen::VectorXd::Zero(3), g), std::invalid_argument);
}

TEST_CASE("edge_distances matches an elementwise norm computation") {
  const iwl::Graph g = iwl::build_graph(4, {{1, 2}, {2, 3}, {4, 1}, {3, 1}}, 3);
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(12);
    for (int c = 0; c < 12; ++c) x(c) = coord(rng);
    const Eigen::VectorXd alpha = edge_distances(x, g);
    for (int k = 0; k < g.num_edges(); ++k) {
      const auto [j, i] = g.edges[k];
      double sq = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double diff = x((i - 1) * 3 + c) - x((j - 1) * 3 + c);
        sq += diff * diff;
      }
      CHECK(alpha(k) == doctest::Approx(std::sqrt(sq)).epsilon(1e-15));
    }
  }
}

TEST_CASE("edge_weights of the zero policy vanish") {
  const iwl::Graph g = iwl::build_graph(3, {{1, 2}, {2, 3}}, 2);
  const PolicyGrid zero = sample_policy(make_sgrid(0.1, 2.0, 16), [](double) { return 0.0; });
  Eigen::VectorXd x(6);
  x << 0, 0, 1, 1, -1, 0.5;
  CHECK(edge_weights(zero, x, g).isZero(0.0));
}

TEST_CASE("edge_weights vanish when every distance is below delta") {
  const iwl::Graph g = iwl::build_graph(3, {{1, 2}, {2, 3}}, 2);
  const PolicyGrid p = sample_policy(make_sgrid(0.5, 2.0, 16), quadratic_truth);
  Eigen::VectorXd x(6);
  x << 0, 0, 0.1, 0.1, 0.2, 0.0;  // all pairwise distances < 0.5
  CHECK(edge_weights(p, x, g).isZero(0.0));
}

TEST_CASE("edge_weights match a 10x-resolution quadrature oracle on the case study") {
  const iwl::Graph g = iwl::build_graph(8,
                                        {{1, 3}, {2, 5}, {3, 8}, {4, 5}, {4, 6}, {6, 7}, {7, 8}},
                                        2);
  const PolicyGrid p = case_study_policy(288);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  Eigen::VectorXd x(16);
  for (int c = 0; c < 16; ++c) x(c) = coord(rng);

  const Eigen::VectorXd alpha = edge_distances(x, g);
  const Eigen::VectorXd w = edge_weights(p, x, g);
  const PolicyGrid fine = case_study_policy(2871);
  const double h = p.grid.spacing();
  for (int k = 0; k < g.num_edges(); ++k) {
    // composite-trapezoid bound (interval length) * h^2 * max|u''| / 12
    const double len = std::max(0.0, std::min(alpha(k), p.grid.Delta) - p.grid.delta);
    const double bound = 1.05 * len * h * h * 6.0 / 12.0 + 1e-12;
    CHECK(std::abs(w(k) - policy_weight(fine, alpha(k))) <= bound);
  }
}
