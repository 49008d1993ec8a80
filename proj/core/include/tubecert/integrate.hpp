#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "tubecert/system.hpp"

namespace tubecert {

/// Any coordinate beyond this magnitude is treated as divergence.
inline constexpr double kDivergenceThreshold = 1e12;

/// states[i] approximates x(i * tau).
struct Trajectory {
  double tau = 0.0;
  std::vector<State> states;
};

/// Piecewise-constant w(t): values[k] holds on [k * period, (k+1) * period).
/// The last value is held past the end.
class UncertaintySignal {
 public:
  UncertaintySignal(double switch_period, std::vector<double> values, double w_radius);

  static UncertaintySignal constant(double value, double w_radius);
  /// Values drawn uniformly from [-w_radius, w_radius].
  static UncertaintySignal random(std::mt19937_64& rng, double w_radius, double switch_period, double t_end);

  [[nodiscard]] double at(double t) const;
  [[nodiscard]] double switch_period() const noexcept { return period_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  double period_;
  std::vector<double> values_;
};

/// x + tau * f(x, 0).
State euler_step(const UncertainSystem& sys, const State& x, double tau);

Trajectory euler_trajectory(const UncertainSystem& sys, const State& x0, double tau, std::size_t steps);

/// Classical fourth-order Runge-Kutta under the signal `w`. The final step is
/// shortened to land on t_end. Every `record_stride`-th state is kept (plus
/// the initial one), so the result has tau = record_stride * tau_fine.
Trajectory oracle_simulate(const UncertainSystem& sys, const State& y0, const UncertaintySignal& w,
                           double tau_fine, double t_end, std::size_t record_stride = 1);

}  // namespace tubecert
