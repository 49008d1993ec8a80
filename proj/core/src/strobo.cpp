#include "tubecert/strobo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tubecert/integrate.hpp"

namespace tubecert {

Tube build_tube(const UncertainSystem& sys, const State& x0, double eps, double tau, std::size_t horizon_steps,
                const PropagationOptions& opts) {
  if (!(eps >= 0.0) || !(tau > 0.0) || horizon_steps < 1) {
    throw Error("build_tube needs eps >= 0, tau > 0 and at least one step");
  }
  Tube tube;
  tube.tau = tau;
  tube.centers = euler_trajectory(sys, x0, tau, horizon_steps).states;
  tube.radii.reserve(horizon_steps + 1);
  tube.constants_log.reserve(horizon_steps);
  tube.radii.push_back(eps);

  DeltaDiagnostics diag;
  for (std::size_t m = 0; m < horizon_steps; ++m) {
    Propagation step = propagate_radius(sys, tube.centers[m], tube.radii[m], tau, opts, &diag);
    tube.clamped = diag.clamped;
    if (!std::isfinite(step.radius) || step.radius > kRadiusBlowUp) {
      tube.centers.resize(tube.radii.size());
      throw TubeBlowUp(m + 1, std::move(tube));
    }
    tube.radii.push_back(step.radius);
    tube.constants_log.push_back(std::move(step.constants));
  }
  return tube;
}

std::vector<Snapshot> snapshots(const Tube& tube, std::size_t k, std::size_t count) {
  if (k < 1 || count < 1) {
    throw Error("snapshots need k >= 1 and count >= 1");
  }
  if ((count - 1) * k >= tube.size()) {
    throw Error("snapshot count exceeds tube horizon");
  }
  std::vector<Snapshot> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back({j, tube.ball(j * k)});
  }
  return out;
}

std::optional<std::size_t> find_inclusion(std::span<const Snapshot> snaps, double margin) {
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    if (ball_contains(snaps[i].ball, snaps[i + 1].ball, margin)) {
      return i;
    }
  }
  return std::nullopt;
}

std::vector<CoordinateExtrema> equilibrium_extrema(const Tube& tube, std::size_t i, std::size_t k) {
  const std::size_t first = i * k;
  const std::size_t last = (i + 1) * k;
  if (k < 1 || last >= tube.size()) {
    throw Error("extrema window lies outside the tube");
  }
  const std::size_t n = tube.centers.front().size();
  std::vector<CoordinateExtrema> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    CoordinateExtrema& e = out[j];
    e.m_plus = tube.centers[first][j] + tube.radii[first];
    e.M_minus = tube.centers[first][j] - tube.radii[first];
    e.m_plus_step = e.M_minus_step = first;
    for (std::size_t m = first + 1; m <= last; ++m) {
      const double up = tube.centers[m][j] + tube.radii[m];
      const double lo = tube.centers[m][j] - tube.radii[m];
      if (up < e.m_plus) {
        e.m_plus = up;
        e.m_plus_step = m;
      }
      if (lo > e.M_minus) {
        e.M_minus = lo;
        e.M_minus_step = m;
      }
    }
  }
  return out;
}

std::vector<PeriodCandidate> scan_period(const Tube& tube, double t_min, double t_max, double t_step,
                                         double margin) {
  if (!(t_step > 0.0) || !(t_min > 0.0) || t_max < t_min) {
    throw Error("empty period grid");
  }
  std::vector<PeriodCandidate> out;
  std::size_t last_k = 0;
  const auto count = static_cast<std::size_t>(std::floor((t_max - t_min) / t_step + 1e-9)) + 1;
  for (std::size_t s = 0; s < count; ++s) {
    const double t = t_min + static_cast<double>(s) * t_step;
    const auto k = static_cast<std::size_t>(std::llround(t / tube.tau));
    if (k < 1 || k == last_k || k >= tube.size()) {
      continue;
    }
    last_k = k;
    const std::vector<Snapshot> snaps = snapshots(tube, k, (tube.size() - 1) / k + 1);
    PeriodCandidate cand;
    cand.period = static_cast<double>(k) * tube.tau;
    cand.k = k;
    cand.inclusion_index = find_inclusion(snaps, margin);
    if (cand.inclusion_index) {
      cand.slack = inclusion_slack(snaps[*cand.inclusion_index].ball, snaps[*cand.inclusion_index + 1].ball);
    } else {
      cand.slack = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
        cand.slack = std::max(cand.slack, inclusion_slack(snaps[i].ball, snaps[i + 1].ball));
      }
    }
    out.push_back(cand);
  }
  if (out.empty()) {
    throw Error("no period candidate fits inside the tube horizon");
  }
  std::stable_sort(out.begin(), out.end(), [](const PeriodCandidate& a, const PeriodCandidate& b) {
    if (a.inclusion_index.has_value() != b.inclusion_index.has_value()) {
      return a.inclusion_index.has_value();
    }
    if (a.slack != b.slack) {
      return a.slack > b.slack;
    }
    return a.k < b.k;
  });
  return out;
}

std::string to_string(Conclusion c) {
  switch (c) {
    case Conclusion::invariant_and_no_equilibrium:
      return "INVARIANT_AND_NO_EQUILIBRIUM";
    case Conclusion::invariant_only:
      return "INVARIANT_ONLY";
    case Conclusion::not_proven:
      break;
  }
  return "NOT_PROVEN";
}

std::size_t steps_per_period(double period, double tau) {
  if (!(tau > 0.0) || !(period > 0.0)) {
    throw Error("period and tau must be positive");
  }
  const double ratio = period / tau;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) > 1e-9 * std::max(1.0, k) || k < 1.0) {
    throw Error("period is not an integer multiple of tau");
  }
  return static_cast<std::size_t>(k);
}

Verdict assess(const Tube& tube, std::size_t k, std::size_t i_max, const Interval& parameter_interval,
               double margin) {
  Verdict v;
  v.period = static_cast<double>(k) * tube.tau;
  v.steps_per_period = k;
  v.parameter_interval = parameter_interval;
  v.clamped = tube.clamped;
  const std::size_t available = (tube.size() - 1) / k + 1;
  const std::size_t count = std::min(available, i_max + 2);
  if (count < 2) {
    throw Error("horizon exhausted: tube shorter than one period");
  }
  v.snapshots = snapshots(tube, k, count);
  v.inclusion_index = find_inclusion(v.snapshots, margin);
  if (v.inclusion_index) {
    v.extrema = equilibrium_extrema(tube, *v.inclusion_index, k);
    for (std::size_t j = 0; j < v.extrema.size(); ++j) {
      if (v.extrema[j].excludes_equilibrium()) {
        v.exclusion_dim = j + 1;
        break;
      }
    }
    v.conclusion = v.exclusion_dim ? Conclusion::invariant_and_no_equilibrium : Conclusion::invariant_only;
  }
  v.limit_cycle_note = v.conclusion == Conclusion::invariant_and_no_equilibrium && tube.centers.front().size() == 2;
  return v;
}

Analysis analyze(const ParametricSystem& family, double p0, double w_radius, const State& x0, double eps,
                 const AnalysisOptions& opts) {
  const std::size_t k = steps_per_period(opts.period, opts.tau);
  const UncertainSystem sys = lift(family, p0, w_radius);
  const std::size_t horizon = opts.horizon_steps.value_or((opts.i_max + 2) * k);
  Analysis out;
  out.tube = build_tube(sys, x0, eps, opts.tau, horizon, opts.propagation);
  out.verdict = assess(out.tube, k, opts.i_max, sys.parameter_interval(), opts.margin);
  return out;
}

}  // namespace tubecert
