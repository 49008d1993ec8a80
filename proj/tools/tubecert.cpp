// tubecert: bounded invariant tubes and stroboscopic inclusion checks.
//
//   tubecert analyze <cfg>
//   tubecert simulate <cfg> --count N
//   tubecert find-period <cfg>
//   tubecert plot <tube.csv> --window i [--period T]
//
// Global flags --out DIR and --seed N override the config file.

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "tubecert/commands.hpp"
#include "tubecert/config.hpp"

namespace {

tubecert::AnalysisConfig load(const std::string& path, const std::optional<std::string>& out,
                              const std::optional<std::uint64_t>& seed) {
  tubecert::AnalysisConfig cfg = tubecert::load_config(path);
  if (out) {
    cfg.out_dir = *out;
  }
  if (seed) {
    cfg.seed = *seed;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded invariant tubes around Euler solutions, with stroboscopic inclusion checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out_dir, "Output directory")->expected(1);
  app.add_option("--seed", seed, "Seed for oracle batteries");

  std::string cfg_path;
  std::string tube_path;
  std::size_t count = 500;
  std::size_t window = 0;
  std::optional<double> period;

  auto* analyze = app.add_subcommand("analyze", "Build the tube and assess inclusion and equilibrium exclusion");
  analyze->add_option("config", cfg_path, "Config file")->required();

  auto* simulate = app.add_subcommand("simulate", "Run the oracle battery against a stored tube");
  simulate->add_option("config", cfg_path, "Config file")->required();
  simulate->add_option("--count", count, "Number of simulations");

  auto* find_period = app.add_subcommand("find-period", "Rank candidate periods over T_scan");
  find_period->add_option("config", cfg_path, "Config file")->required();

  auto* plot = app.add_subcommand("plot", "Plot a stored tube");
  plot->add_option("tube", tube_path, "Tube CSV")->required();
  plot->add_option("--window", window, "Window index i")->required();
  plot->add_option("--period", period, "Period T (default: from verdict.txt)");


  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tubecert::cli::kFailure;
  }

  try {
    if (*analyze) {
      return tubecert::cli::cmd_analyze(load(cfg_path, out_dir, seed), std::cout);
    }
    if (*simulate) {
      return tubecert::cli::cmd_simulate(load(cfg_path, out_dir, seed), count, std::cout);
    }
    if (*find_period) {
      return tubecert::cli::cmd_find_period(load(cfg_path, out_dir, seed), std::cout);
    }
    return tubecert::cli::cmd_plot(tube_path, window, period, out_dir.value_or("."), std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tubecert::cli::kFailure;
  }
}
