#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "tubecert/strobo.hpp"
#include "tubecert/system.hpp"

namespace tubecert {

/// Monte-Carlo soundness check of a tube: random initial points in
/// B(x0, eps), random piecewise-constant w(.), Runge-Kutta reference
/// solutions compared against every tube ball.
struct BatteryOptions {
  std::size_t count = 500;
  std::uint64_t seed = 0;
  std::size_t substeps = 10;       // oracle steps per tube step
  std::size_t switch_steps = 10;   // tube steps per constant piece of w
  double tolerance = 1e-6;
  std::size_t threads = 0;         // 0: hardware concurrency
};

struct BatteryReport {
  std::size_t simulations = 0;
  std::size_t violating_simulations = 0;
  std::size_t violations = 0;  // (simulation, step) pairs outside the tube
  double worst_excess = 0.0;   // max of |x - center| - radius
  std::size_t first_violation_sim = 0;
  std::size_t first_violation_step = 0;

  [[nodiscard]] bool passed() const { return violations == 0; }
};

/// Uniform sample from B(center, radius).
State sample_ball(std::mt19937_64& rng, const State& center, double radius);

/// Results depend only on (seed, simulation index), not on thread count.
BatteryReport run_oracle_battery(const UncertainSystem& sys, const Tube& tube, const BatteryOptions& opts);

}  // namespace tubecert
