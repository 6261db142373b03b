#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "iwl/config.hpp"
#include "iwl/io.hpp"
#include "iwl/errors.hpp"
#include "test_support.hpp"

using iwl::ExperimentConfig;
using nlohmann::json;

namespace {

json base_doc() {
  return json{
      {"graph",
       {{"num_nodes", 3}, {"state_dim", 2}, {"edges", json::array({{1, 2}, {2, 3}})}}},
      {"horizon", {{"t0", 0.0}, {"tf", 2.0}, {"dt", 0.01}}},
      {"s_grid", {{"delta", 0.1}, {"Delta", 2.0}, {"num_points", 32}}},
      {"separation", 0.3},
      {"goal", {{"gain", 1.0}, {"activation", "always"}}},
      {"true_policy", "quadratic_3(s-d)^2"},
      {"nominal_policy", "linear_3(s-d)"},
      {"positions", {{"initial", "random"}, {"goal", "random"}, {"seed", 7}}},
      {"solver", {{"max_iter", 20}, {"grad_tol", 1e-5}}},
      {"output_dir", "out"}};
}

}  // namespace

TEST_CASE("parse_config accepts the base document") {
  const ExperimentConfig cfg = iwl::parse_config(base_doc());
  CHECK(cfg.num_nodes == 3);
  CHECK(cfg.edges.size() == 2);
  CHECK(cfg.tf == 2.0);
  CHECK(cfg.num_points == 32);
  CHECK(cfg.random_positions);
  CHECK(cfg.seed == 7);
  CHECK(cfg.solver.max_iter == 20);
  CHECK(cfg.solver.armijo.initial_step == 1.0);  // defaults kept
}

TEST_CASE("parse_config reports missing and malformed keys") {
  json doc = base_doc();
  doc.erase("true_policy");
  CHECK_THROWS_WITH_AS(iwl::parse_config(doc), doctest::Contains("true_policy"),
                       iwl::ConfigError);

  doc = base_doc();
  doc["graph"]["edges"] = json::array({{1, 1}});
  CHECK_THROWS_AS(iwl::parse_config(doc), iwl::ConfigError);

  doc = base_doc();
  doc["horizon"]["dt"] = 0.3;  // does not divide tf - t0
  CHECK_THROWS_AS(iwl::parse_config(doc), iwl::ConfigError);

  doc = base_doc();
  doc["goal"]["activation"] = "threshold";  // epsilon missing
  CHECK_THROWS_WITH_AS(iwl::parse_config(doc), doctest::Contains("epsilon"),
                       iwl::ConfigError);

  doc = base_doc();
  doc["positions"].erase("seed");
  CHECK_THROWS_WITH_AS(iwl::parse_config(doc), doctest::Contains("seed"), iwl::ConfigError);
}

TEST_CASE("explicit positions parse into stacked vectors") {
  json doc = base_doc();
  doc["positions"] = {{"initial", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}},
                      {"goal", {{1.0, 1.0}, {2.0, 0.0}, {0.0, 2.0}}}};
  ExperimentConfig cfg = iwl::parse_config(doc);
  CHECK_FALSE(cfg.random_positions);
  CHECK(cfg.initial.size() == 6);
  CHECK(cfg.initial(2) == 1.0);
  iwl::resolve_positions(cfg);  // no-op
  CHECK(cfg.goals(5) == 2.0);

  doc["positions"]["initial"] = {{0.0}, {1.0}, {2.0}};  // wrong state_dim
  CHECK_THROWS_AS(iwl::parse_config(doc), iwl::ConfigError);
}

TEST_CASE("resolve_positions is deterministic in the seed") {
  ExperimentConfig a = iwl::parse_config(base_doc());
  ExperimentConfig b = iwl::parse_config(base_doc());
  iwl::resolve_positions(a);
  iwl::resolve_positions(b);
  CHECK(test_support::exact_equal(a.initial, b.initial));
  CHECK(test_support::exact_equal(a.goals, b.goals));
  CHECK(a.initial.minCoeff() >= -2.0);
  CHECK(a.initial.maxCoeff() <= 2.0);

  ExperimentConfig c = iwl::parse_config(base_doc());
  c.seed = 8;
  iwl::resolve_positions(c);
  CHECK_FALSE(test_support::exact_equal(a.initial, c.initial));
}

TEST_CASE("resolve_policy knows the named presets") {
  const iwl::SGrid grid = iwl::make_sgrid(0.15, 3.02, 64);
  const iwl::PolicyGrid quad = iwl::resolve_policy("quadratic_3(s-d)^2", grid, 0.3);
  CHECK(quad.values(0) == doctest::Approx(3.0 * 0.0225).epsilon(1e-12));
  const iwl::PolicyGrid lin = iwl::resolve_policy("linear_3(s-d)", grid, 0.3);
  CHECK(lin.values(0) == doctest::Approx(-0.45).epsilon(1e-12));
  const iwl::PolicyGrid c = iwl::resolve_policy("constant:1.25", grid, 0.3);
  CHECK(c.values.minCoeff() == 1.25);
  CHECK(c.values.maxCoeff() == 1.25);
  CHECK_THROWS_AS(iwl::resolve_policy("cubic", grid, 0.3), iwl::ConfigError);
  CHECK_THROWS_AS(iwl::resolve_policy("constant:abc", grid, 0.3), iwl::ConfigError);
}

TEST_CASE("resolve_policy loads a policy from CSV") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "iwl_config_test";
  std::filesystem::create_directories(dir);
  const iwl::SGrid file_grid = iwl::make_sgrid(0.1, 2.0, 96);
  iwl::io::write_policy_csv(dir / "u.csv",
                            iwl::sample_policy(file_grid, [](double s) { return 2.0 * s; }));

  const iwl::SGrid grid = iwl::make_sgrid(0.1, 2.0, 33);
  const iwl::PolicyGrid p =
      iwl::resolve_policy("csv:" + (dir / "u.csv").string(), grid, 0.3);
  CHECK(p.values(0) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(p.values(32) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("config echo round-trips through the parser") {
  ExperimentConfig cfg = iwl::parse_config(base_doc());
  iwl::resolve_positions(cfg);
  const json echo = iwl::config_to_json(cfg);
  CHECK(echo["positions"]["initial"].is_array());  // explicit after resolution

  const ExperimentConfig again = iwl::parse_config(echo);
  CHECK_FALSE(again.random_positions);
  CHECK(test_support::exact_equal(again.initial, cfg.initial));
  CHECK(test_support::exact_equal(again.goals, cfg.goals));
  CHECK(again.solver.max_iter == cfg.solver.max_iter);
  CHECK(again.true_policy == cfg.true_policy);
}

TEST_CASE("load_config maps file and JSON problems to the right errors") {
  CHECK_THROWS_AS(iwl::load_config("/nonexistent/config.json"), iwl::IoError);

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "iwl_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "broken.json");
    out << "{ not json";
  }
  CHECK_THROWS_AS(iwl::load_config(dir / "broken.json"), iwl::ConfigError);
}
