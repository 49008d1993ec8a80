#include "tubecert/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "tubecert/battery.hpp"
#include "tubecert/error.hpp"
#include "tubecert/io.hpp"

namespace tubecert::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  return out;
}

void write_svgs(const Tube& tube, const std::optional<PlotWindow>& window, const fs::path& dir) {
  for (std::size_t j = 0; j < tube.centers.front().size(); ++j) {
    auto out = open_out(dir / ("tube_x" + std::to_string(j + 1) + ".svg"));
    write_tube_svg(out, tube, j, window);
  }
}

std::size_t scan_horizon(const AnalysisConfig& cfg) {
  if (cfg.horizon) {
    return *cfg.horizon;
  }
  const auto k_max = static_cast<std::size_t>(std::llround(cfg.scan->t_max / cfg.tau));
  return (cfg.i_max + 2) * k_max;
}

void write_blowup(const TubeBlowUp& e, const AnalysisConfig& cfg, std::ostream& log) {
  log << "error: " << e.what() << '\n';
  {
    auto out = open_out(cfg.out_dir / "verdict.txt");
    out << "status: error\n";
    out << "error: " << e.what() << '\n';
    out << "blowup_step: " << e.step() << '\n';
    const Tube& partial = e.partial();
    out << "last_finite_time: " << format_exact(static_cast<double>(partial.size() - 1) * partial.tau) << '\n';
    out << "last_finite_radius: " << format_exact(partial.radii.back()) << '\n';
    if (cfg.reference_inclusion_index) {
      out << "reference_inclusion_index: " << *cfg.reference_inclusion_index << '\n';
    }
  }
  auto csv = open_out(cfg.out_dir / "tube_partial.csv");
  write_tube_csv(csv, e.partial());
}

void print_verdict_summary(const Verdict& v, std::ostream& log) {
  log << "conclusion: " << to_string(v.conclusion) << "  T = " << format_exact(v.period)
      << "  i = " << (v.inclusion_index ? std::to_string(*v.inclusion_index) : "none")
      << "  interval = [" << format_exact(v.parameter_interval.lo) << ", " << format_exact(v.parameter_interval.hi)
      << "]\n";
}

}  // namespace

int exit_code(Conclusion c) { return c == Conclusion::invariant_and_no_equilibrium ? kProven : kNotProven; }

int cmd_analyze(const AnalysisConfig& cfg, std::ostream& log) {
  try {
    if (!cfg.period && !cfg.scan) {
      throw ConfigError("T", "analyze needs T or T_scan");
    }
    const ParametricSystem family = build_family(cfg);
    const UncertainSystem sys = lift(family, cfg.p0, cfg.w_radius);
    const PropagationOptions popts = propagation_options(cfg);

    Tube tube;
    Verdict verdict;
    if (cfg.period) {
      AnalysisOptions opts;
      opts.tau = cfg.tau;
      opts.period = *cfg.period;
      opts.i_max = cfg.i_max;
      opts.propagation = popts;
      opts.margin = cfg.margin;
      opts.horizon_steps = cfg.horizon;
      Analysis a = analyze(family, cfg.p0, cfg.w_radius, cfg.x0, cfg.eps, opts);
      tube = std::move(a.tube);
      verdict = std::move(a.verdict);
    } else {
      tube = build_tube(sys, cfg.x0, cfg.eps, cfg.tau, scan_horizon(cfg), popts);
      const auto ranked = scan_period(tube, cfg.scan->t_min, cfg.scan->t_max, cfg.scan->t_step, cfg.margin);
      log << "scanned " << ranked.size() << " periods; best T = " << format_exact(ranked.front().period) << '\n';
      verdict = assess(tube, ranked.front().k, cfg.i_max, sys.parameter_interval(), cfg.margin);
    }

    {
      auto out = open_out(cfg.out_dir / "verdict.txt");
      write_verdict(out, verdict, &cfg);
    }
    {
      auto out = open_out(cfg.out_dir / "tube.csv");
      write_tube_csv(out, tube);
    }
    std::optional<PlotWindow> window;
    if (verdict.inclusion_index) {
      window = PlotWindow{*verdict.inclusion_index, verdict.steps_per_period};
    }
    write_svgs(tube, window, cfg.out_dir);
    print_verdict_summary(verdict, log);
    return exit_code(verdict.conclusion);
  } catch (const TubeBlowUp& e) {
    try {
      write_blowup(e, cfg, log);
    } catch (const std::exception& inner) {
      log << "error: " << inner.what() << '\n';
    }
    return kFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_simulate(const AnalysisConfig& cfg, std::size_t count, std::ostream& log) {
  try {
    const UncertainSystem sys = lift(build_family(cfg), cfg.p0, cfg.w_radius);
    const fs::path path = cfg.tube_path.value_or(cfg.out_dir / "tube.csv");
    if (!fs::exists(path)) {
      std::size_t horizon = 0;
      if (cfg.horizon) {
        horizon = *cfg.horizon;
      } else if (cfg.period) {
        horizon = (cfg.i_max + 2) * steps_per_period(*cfg.period, cfg.tau);
      } else if (cfg.scan) {
        horizon = scan_horizon(cfg);
      } else {
        throw ConfigError("T", "no stored tube and no horizon, T or T_scan to build one");
      }
      const Tube built = build_tube(sys, cfg.x0, cfg.eps, cfg.tau, horizon, propagation_options(cfg));
      auto out = open_out(path);
      write_tube_csv(out, built);
      log << "built and stored tube at " << path.string() << '\n';
    }
    std::ifstream in(path);
    if (!in) {
      throw Error("cannot read " + path.string());
    }
    const Tube tube = read_tube_csv(in);
    if (tube.centers.front().size() != sys.dimension()) {
      throw Error("stored tube dimension does not match the system");
    }
    BatteryOptions opts = battery_options(cfg);
    opts.count = count;
    const BatteryReport r = run_oracle_battery(sys, tube, opts);
    log << "simulations: " << r.simulations << '\n'
        << "violating_simulations: " << r.violating_simulations << '\n'
        << "violations: " << r.violations << '\n';
    if (r.simulations > 0) {
      log << "worst_excess: " << format_exact(r.worst_excess) << '\n';
    }
    if (!r.passed()) {
      log << "first_violation: simulation " << r.first_violation_sim << " step " << r.first_violation_step << '\n';
    }
    return r.passed() ? kProven : kNotProven;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_find_period(const AnalysisConfig& cfg, std::ostream& log) {
  try {
    if (!cfg.scan) {
      throw ConfigError("T_scan", "find-period needs a scan range");
    }
    const UncertainSystem sys = lift(build_family(cfg), cfg.p0, cfg.w_radius);
    const Tube tube = build_tube(sys, cfg.x0, cfg.eps, cfg.tau, scan_horizon(cfg), propagation_options(cfg));
    const auto ranked = scan_period(tube, cfg.scan->t_min, cfg.scan->t_max, cfg.scan->t_step, cfg.margin);

    auto csv = open_out(cfg.out_dir / "periods.csv");
    csv << "rank,T,k,inclusion_index,slack\n";
    log << std::left << std::setw(6) << "rank" << std::setw(12) << "T" << std::setw(10) << "k" << std::setw(8) << "i"
        << "slack\n";
    bool any = false;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      const PeriodCandidate& c = ranked[r];
      any = any || c.inclusion_index.has_value();
      const std::string idx = c.inclusion_index ? std::to_string(*c.inclusion_index) : "none";
      csv << r + 1 << ',' << format_exact(c.period) << ',' << c.k << ',' << idx << ',' << format_exact(c.slack)
          << '\n';
      if (r < 20) {
        log << std::left << std::setw(6) << r + 1 << std::setw(12) << format_exact(c.period) << std::setw(10) << c.k
            << std::setw(8) << idx << format_exact(c.slack) << '\n';
      }
    }
    return any ? kProven : kNotProven;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_plot(const fs::path& tube_csv, std::size_t window, std::optional<double> period, const fs::path& out_dir,
             std::ostream& log) {
  try {
    std::ifstream in(tube_csv);
    if (!in) {
      throw Error("cannot read " + tube_csv.string());
    }
    const Tube tube = read_tube_csv(in);
    std::size_t k = 0;
    if (period) {
      k = steps_per_period(*period, tube.tau);
    } else {
      std::ifstream vin(tube_csv.parent_path() / "verdict.txt");
      if (!vin) {
        throw Error("no --period given and no verdict.txt beside the tube");
      }
      const auto kv = read_key_values(vin);
      const auto it = kv.find("steps_per_period");
      if (it == kv.end()) {
        throw Error("verdict.txt has no steps_per_period");
      }
      k = std::stoul(it->second);
    }
    if (k == 0 || (window + 1) * k >= tube.size()) {
      throw Error("window " + std::to_string(window) + " lies beyond the tube horizon");
    }
    write_svgs(tube, PlotWindow{window, k}, out_dir);
    log << "wrote " << tube.centers.front().size() << " plot(s) to " << out_dir.string() << '\n';
    return kProven;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace tubecert::cli
