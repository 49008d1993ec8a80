#include "tubecert/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "tubecert/error.hpp"

namespace tubecert {

namespace {

bool diverged(std::span<const double> x) {
  return std::any_of(x.begin(), x.end(),
                     [](double v) { return !std::isfinite(v) || std::abs(v) > kDivergenceThreshold; });
}

}  // namespace

UncertaintySignal::UncertaintySignal(double switch_period, std::vector<double> values, double w_radius)
    : period_(switch_period), values_(std::move(values)) {
  if (!(period_ > 0.0)) {
    throw Error("switch period must be positive");
  }
  if (values_.empty()) {
    throw Error("uncertainty signal needs at least one value");
  }
  for (double v : values_) {
    if (!(std::abs(v) <= w_radius)) {
      throw Error("uncertainty value outside [-w_radius, w_radius]");
    }
  }
}

UncertaintySignal UncertaintySignal::constant(double value, double w_radius) {
  return {1.0, {value}, w_radius};
}

UncertaintySignal UncertaintySignal::random(std::mt19937_64& rng, double w_radius, double switch_period,
                                            double t_end) {
  const auto pieces = static_cast<std::size_t>(std::ceil(t_end / switch_period)) + 1;
  std::uniform_real_distribution<double> dist(-w_radius, w_radius);
  std::vector<double> values(pieces);
  for (double& v : values) {
    v = w_radius > 0.0 ? std::clamp(dist(rng), -w_radius, w_radius) : 0.0;
  }
  return {switch_period, std::move(values), w_radius};
}

double UncertaintySignal::at(double t) const {
  if (t <= 0.0) {
    return values_.front();
  }
  const auto k = static_cast<std::size_t>(t / period_);
  return values_[std::min(k, values_.size() - 1)];
}

State euler_step(const UncertainSystem& sys, const State& x, double tau) {
  if (!(tau > 0.0)) {
    throw Error("time step must be positive");
  }
  State f = sys.eval(x, 0.0);
  State next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    next[i] = x[i] + tau * f[i];
  }
  if (diverged(next)) {
    throw DivergenceError("Euler iterate diverged", 1);
  }
  return next;
}

Trajectory euler_trajectory(const UncertainSystem& sys, const State& x0, double tau, std::size_t steps) {
  if (!(tau > 0.0)) {
    throw Error("time step must be positive");
  }
  if (x0.size() != sys.dimension()) {
    throw Error("initial state has wrong dimension");
  }
  Trajectory traj{tau, {}};
  traj.states.reserve(steps + 1);
  traj.states.push_back(x0);
  State f(x0.size());
  for (std::size_t s = 0; s < steps; ++s) {
    const State& x = traj.states.back();
    sys.eval_into(x, 0.0, f);
    State next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      next[i] = x[i] + tau * f[i];
    }
    if (diverged(next)) {
      throw DivergenceError("Euler iterate diverged", s + 1);
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Trajectory oracle_simulate(const UncertainSystem& sys, const State& y0, const UncertaintySignal& w,
                           double tau_fine, double t_end, std::size_t record_stride) {
  if (!(tau_fine > 0.0) || !(t_end >= 0.0) || record_stride == 0) {
    throw Error("invalid oracle step configuration");
  }
  const std::size_t n = y0.size();
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / tau_fine - 1e-9));
  Trajectory traj{tau_fine * static_cast<double>(record_stride), {}};
  traj.states.reserve(steps / record_stride + 2);
  traj.states.push_back(y0);

  State y = y0;
  State k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * tau_fine;
    const double h = std::min(tau_fine, t_end - t);
    // The signal is sampled mid-step so a switch never lands inside a stage.
    const double wv = w.at(t + 0.5 * h);
    sys.eval_into(y, wv, k1);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    sys.eval_into(tmp, wv, k2);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    sys.eval_into(tmp, wv, k3);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * k3[i];
    }
    sys.eval_into(tmp, wv, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (diverged(y)) {
      throw DivergenceError("oracle simulation diverged", s + 1);
    }
    if ((s + 1) % record_stride == 0 || s + 1 == steps) {
      traj.states.push_back(y);
    }
  }
  return traj;
}

}  // namespace tubecert
