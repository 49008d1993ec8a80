#include "tubecert/battery.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "tubecert/integrate.hpp"

namespace tubecert {

State sample_ball(std::mt19937_64& rng, const State& center, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  State dir(center.size());
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& d : dir) {
      d = gauss(rng);
    }
    norm = norm2(dir);
  }
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(center.size()));
  State out(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    out[i] = center[i] + r * dir[i] / norm;
  }
  return out;
}

namespace {

struct SimResult {
  std::size_t violations = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t first_step = 0;
};

SimResult simulate_one(const UncertainSystem& sys, const Tube& tube, const BatteryOptions& opts,
                       std::size_t index) {
  std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  const double t_end = static_cast<double>(tube.size() - 1) * tube.tau;
  const State y0 = sample_ball(rng, tube.centers.front(), tube.radii.front());
  const auto signal = UncertaintySignal::random(rng, sys.w_radius(),
                                                static_cast<double>(opts.switch_steps) * tube.tau, t_end);
  const double fine = tube.tau / static_cast<double>(opts.substeps);
  SimResult res;
  const Trajectory traj = oracle_simulate(sys, y0, signal, fine, t_end, opts.substeps);
  const std::size_t steps = std::min(traj.states.size(), tube.size());
  for (std::size_t m = 0; m < steps; ++m) {
    const double excess = distance2(traj.states[m], tube.centers[m]) - tube.radii[m];
    res.worst_excess = std::max(res.worst_excess, excess);
    if (excess > opts.tolerance) {
      if (res.violations == 0) {
        res.first_step = m;
      }
      ++res.violations;
    }
  }
  return res;
}

}  // namespace

BatteryReport run_oracle_battery(const UncertainSystem& sys, const Tube& tube, const BatteryOptions& opts) {
  BatteryReport report;
  report.simulations = opts.count;
  if (opts.count == 0 || tube.size() == 0) {
    return report;
  }
  if (opts.substeps == 0 || opts.switch_steps == 0) {
    throw Error("battery substeps and switch_steps must be positive");
  }
  std::vector<SimResult> results(opts.count);
  std::size_t threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, opts.count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < opts.count; i = next++) {
        try {
          results[i] = simulate_one(sys, tube, opts, i);
        } catch (...) {
          if (!failed.exchange(true)) {
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  report.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const SimResult& r = results[i];
    report.worst_excess = std::max(report.worst_excess, r.worst_excess);
    if (r.violations > 0) {
      if (report.violating_simulations == 0) {
        report.first_violation_sim = i;
        report.first_violation_step = r.first_step;
      }
      ++report.violating_simulations;
      report.violations += r.violations;
    }
  }
  return report;
}

}  // namespace tubecert
