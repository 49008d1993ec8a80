#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tubecert/bounds.hpp"
#include "tubecert/error.hpp"
#include "tubecert/system.hpp"

namespace tubecert {

/// Any radius beyond this aborts tube construction.
inline constexpr double kRadiusBlowUp = 1e12;

/// Balls B(centers[m], radii[m]) at t = m * tau. constants_log[m] holds the
/// constants used for the step m -> m+1, so it is one shorter than centers.
struct Tube {
  double tau = 0.0;
  std::vector<State> centers;
  std::vector<double> radii;
  std::vector<BoundConstants> constants_log;
  std::size_t clamped = 0;

  [[nodiscard]] std::size_t size() const noexcept { return centers.size(); }
  [[nodiscard]] Ball ball(std::size_t m) const { return {centers[m], radii[m]}; }
};

/// Thrown when the radius overflows; carries the tube built so far.
class TubeBlowUp : public Error {
 public:
  TubeBlowUp(std::size_t step, Tube partial)
      : Error("tube blow-up at step " + std::to_string(step)), step_(step), partial_(std::move(partial)) {}
  [[nodiscard]] std::size_t step() const noexcept { return step_; }
  [[nodiscard]] const Tube& partial() const noexcept { return partial_; }

 private:
  std::size_t step_;
  Tube partial_;
};

Tube build_tube(const UncertainSystem& sys, const State& x0, double eps, double tau, std::size_t horizon_steps,
                const PropagationOptions& opts = {});

struct Snapshot {
  std::size_t index = 0;
  Ball ball;
};

/// Snapshots j = 0..count-1 at steps j * k.
std::vector<Snapshot> snapshots(const Tube& tube, std::size_t k, std::size_t count);

/// Smallest i with snaps[i+1] inside snaps[i].
std::optional<std::size_t> find_inclusion(std::span<const Snapshot> snaps, double margin = 0.0);

/// Per coordinate j over the closed step window [i k, (i+1) k]:
/// m_plus = min(center_j + r), M_minus = max(center_j - r).
struct CoordinateExtrema {
  double m_plus = 0.0;
  double M_minus = 0.0;
  std::size_t m_plus_step = 0;
  std::size_t M_minus_step = 0;
  [[nodiscard]] bool excludes_equilibrium() const { return m_plus < M_minus; }
};

std::vector<CoordinateExtrema> equilibrium_extrema(const Tube& tube, std::size_t i, std::size_t k);

struct PeriodCandidate {
  double period = 0.0;
  std::size_t k = 0;
  std::optional<std::size_t> inclusion_index;
  /// Slack at the found index, or the best slack over consecutive pairs.
  double slack = 0.0;
};

/// Tries T = k tau for T on [t_min, t_max] with step t_step. Successful
/// candidates come first, then larger slack, then smaller T.
std::vector<PeriodCandidate> scan_period(const Tube& tube, double t_min, double t_max, double t_step,
                                         double margin = 0.0);

enum class Conclusion { invariant_and_no_equilibrium, invariant_only, not_proven };

std::string to_string(Conclusion c);

struct Verdict {
  double period = 0.0;
  std::size_t steps_per_period = 0;
  std::optional<std::size_t> inclusion_index;
  std::vector<CoordinateExtrema> extrema;  // empty without an inclusion index
  std::optional<std::size_t> exclusion_dim;  // 1-based
  Interval parameter_interval;
  Conclusion conclusion = Conclusion::not_proven;
  bool limit_cycle_note = false;
  std::vector<Snapshot> snapshots;
  std::size_t clamped = 0;
};

struct AnalysisOptions {
  double tau = 1e-3;
  double period = 0.0;
  std::size_t i_max = 8;
  PropagationOptions propagation;
  double margin = 0.0;
  /// Defaults to (i_max + 2) periods.
  std::optional<std::size_t> horizon_steps;
};

struct Analysis {
  Verdict verdict;
  Tube tube;
};

/// Steps per period for T = k tau; throws unless T / tau is within 1e-9 of an integer.
std::size_t steps_per_period(double period, double tau);

/// Verdict from an already built tube.
Verdict assess(const Tube& tube, std::size_t k, std::size_t i_max, const Interval& parameter_interval,
               double margin = 0.0);

/// Lift, build the tube, test inclusion then equilibrium exclusion.
Analysis analyze(const ParametricSystem& family, double p0, double w_radius, const State& x0, double eps,
                 const AnalysisOptions& opts);

}  // namespace tubecert
