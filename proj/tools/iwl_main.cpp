#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "iwl/errors.hpp"
#include "iwl/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "Experiment config (JSON)")
      ->required();
  cmd->add_option("-o,--out", opts.out_dir, "Output directory (defaults to config output_dir)");
  cmd->add_option("-s,--seed", opts.seed, "Override the position-sampling seed");
}

iwl::ExperimentConfig load(const CommonOpts& opts) {
  iwl::ExperimentConfig cfg = iwl::load_config(opts.config_path);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.random_positions = true;  // re-sample under the override
  }
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

void print_metrics(const iwl::Metrics& m) {
  std::cout << "traj_mse            = " << m.traj_mse << "\n"
            << "weight_mse          = " << m.weight_mse << "\n"
            << "policy_rmse_visited = " << m.policy_rmse_visited << "\n"
            << "final_cost          = " << m.final_cost << "\n"
            << "visited_range       = [" << m.visited_lo << ", " << m.visited_hi << "]\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent interaction-weight learning from demonstrations"};
  app.require_subcommand(1);

  CommonOpts demo_opts, learn_opts, eval_opts, all_opts;
  add_common(app.add_subcommand("demo", "Generate a demonstration trajectory"), demo_opts);
  add_common(app.add_subcommand("learn", "Recover the interaction policy from a demo"),
             learn_opts);
  add_common(app.add_subcommand("eval", "Compare the learned policy against the truth"),
             eval_opts);
  add_common(app.add_subcommand("all", "demo + learn + eval"), all_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("demo")) {
      const iwl::ExperimentConfig cfg = load(demo_opts);
      iwl::run_demo(cfg, cfg.output_dir);
      std::cout << "demo written to " << cfg.output_dir << "\n";
    } else if (app.got_subcommand("learn")) {
      const iwl::ExperimentConfig cfg = load(learn_opts);
      const iwl::SolveReport report = iwl::run_learn(cfg, cfg.output_dir);
      std::cout << "learned in " << report.iterations
                << " iterations (" << iwl::to_string(report.termination)
                << "), final cost " << report.cost_history.back() << "\n";
    } else if (app.got_subcommand("eval")) {
      const iwl::ExperimentConfig cfg = load(eval_opts);
      print_metrics(iwl::run_eval(cfg, cfg.output_dir));
    } else if (app.got_subcommand("all")) {
      const iwl::ExperimentConfig cfg = load(all_opts);
      print_metrics(iwl::run_all(cfg, cfg.output_dir));
    }
  } catch (const iwl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const iwl::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const iwl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
