// cascade: run cascading-bandit regret experiments and theory checks.
//
//   cascade run   --config cfg.json --out results/ [--workers N] [--seed S]
//   cascade sweep --config cfg.json --axis K --values 2,4,8 --out sweep/
//   cascade check [--out report/]
//   cascade version

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cascade/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cascading bandit regret experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  std::string axis;
  std::string values;
  double kl_lower_constant = 12.0;

  auto* run = app.add_subcommand("run", "Run every policy of a config and export per-trial regret");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads (0 = all cores)");
  run->add_option("--seed", seed, "Override the config seed");

  auto* sw = app.add_subcommand("sweep", "Sweep K, n or L and fit log-log scaling exponents");
  sw->add_option("--config", config_path, "JSON experiment config")->required();
  sw->add_option("--axis", axis, "Sweep axis: K, n or L")->required();
  sw->add_option("--values", values, "Comma-separated values, e.g. 2,4,8 or 2^12,2^13")->required();
  sw->add_option("--out", out_dir, "Output directory")->required();
  sw->add_option("--workers", workers, "Worker threads (0 = all cores)");
  sw->add_option("--seed", seed, "Override the config seed");

  auto* check = app.add_subcommand("check", "Run the numeric inequality suite");
  check->add_option("--out", out_dir, "Directory for check_report.txt");
  check->add_option("--kl-lower-constant", kl_lower_constant, "Denominator constant of the KL lower bound")
      ->group("");

  app.add_subcommand("version", "Print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cascade::cli::kConfigError;
  }

  cascade::cli::RunOptions opt;
  opt.workers = workers;
  opt.seed = seed;

  if (run->parsed()) return cascade::cli::cmd_run(config_path, out_dir, opt, std::cerr);
  if (sw->parsed()) return cascade::cli::cmd_sweep(config_path, axis, values, out_dir, opt, std::cerr);
  if (check->parsed()) {
    cascade::TheoryCheckOptions copt;
    copt.kl_lower_constant = kl_lower_constant;
    return cascade::cli::cmd_check(out_dir, copt, std::cout, std::cerr);
  }
  std::cout << "cascade " << cascade::kToolVersion << "\n";
  return 0;
}
