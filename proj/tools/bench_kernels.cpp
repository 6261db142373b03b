// Times the serial reference kernels against the OpenMP variants on
// synthetic data and checks that both produce bitwise-identical results.
//
//   iwl_bench [rows] [agents] [grid_points]

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>
#include <vector>

#include "iwl/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using iwl::kernels::Exec;

namespace {

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename Fn>
double time_best_of(int reps, const Fn& fn) {
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, seconds(t0, t1));
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::cout << name << ": serial " << serial * 1e3 << " ms, parallel " << parallel * 1e3
            << " ms, speedup " << serial / parallel << "x, bitwise "
            << (identical ? "identical" : "DIFFERENT") << "\n";
}

template <typename A>
bool bitwise_equal(const A& a, const A& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

}  // namespace

int main(int argc, char** argv) {
  const int rows = argc > 1 ? std::atoi(argv[1]) : 4000;
  const int agents = argc > 2 ? std::atoi(argv[2]) : 64;
  const int grid_points = argc > 3 ? std::atoi(argv[3]) : 1024;
  const int d = 2;

#ifdef _OPENMP
  std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "built without OpenMP; parallel falls back to serial\n";
#endif

  // Ring plus skip edges.
  std::vector<std::pair<int, int>> edges;
  for (int a = 1; a <= agents; ++a) {
    edges.emplace_back(a, a % agents + 1);
    edges.emplace_back(a, (a + 6) % agents + 1);
  }
  const iwl::Graph g = iwl::build_graph(agents, edges, d);

  std::mt19937_64 rng(42);
  const auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  std::vector<Eigen::VectorXd> states(rows);
  for (auto& x : states) {
    x.resize(g.ensemble_dim());
    for (int c = 0; c < x.size(); ++c) x(c) = uniform(-3.0, 3.0);
  }

  const iwl::SGrid grid = iwl::make_sgrid(0.15, 3.02, grid_points);
  const iwl::PolicyGrid policy =
      iwl::sample_policy(grid, [](double s) { return 3.0 * (s - 0.3) * (s - 0.3); });

  Eigen::MatrixXd dist_s, dist_p;
  const double t_dist_s =
      time_best_of(3, [&] { dist_s = iwl::kernels::distance_rows(states, g, Exec::serial); });
  const double t_dist_p =
      time_best_of(3, [&] { dist_p = iwl::kernels::distance_rows(states, g, Exec::parallel); });
  report("distance_rows      ", t_dist_s, t_dist_p, bitwise_equal(dist_s, dist_p));

  Eigen::MatrixXd w_s, w_p;
  const double t_w_s =
      time_best_of(3, [&] { w_s = iwl::kernels::weight_rows(policy, dist_s, Exec::serial); });
  const double t_w_p =
      time_best_of(3, [&] { w_p = iwl::kernels::weight_rows(policy, dist_s, Exec::parallel); });
  report("weight_rows        ", t_w_s, t_w_p, bitwise_equal(w_s, w_p));

  Eigen::MatrixXd coef(rows, g.num_edges());
  for (int t = 0; t < rows; ++t)
    for (int k = 0; k < g.num_edges(); ++k) coef(t, k) = uniform(-1.0, 1.0);
  const Eigen::VectorXd tw = Eigen::VectorXd::Constant(rows, 1e-3);

  Eigen::VectorXd mti_s, mti_p;
  const double t_mti_s = time_best_of(3, [&] {
    mti_s = iwl::kernels::masked_time_integral(grid.nodes(), dist_s, coef, tw, Exec::serial);
  });
  const double t_mti_p = time_best_of(3, [&] {
    mti_p = iwl::kernels::masked_time_integral(grid.nodes(), dist_s, coef, tw, Exec::parallel);
  });
  report("masked_time_integral", t_mti_s, t_mti_p, bitwise_equal(mti_s, mti_p));

  const bool all_identical = (bitwise_equal(dist_s, dist_p)) && (bitwise_equal(w_s, w_p)) && (bitwise_equal(mti_s, mti_p));
  return all_identical ? 0 : 1;
}
