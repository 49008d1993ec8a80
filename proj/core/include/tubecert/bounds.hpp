#pragma once

#include <cstddef>

#include "tubecert/system.hpp"

namespace tubecert {

/// |lambda| below this selects the lambda = 0 closed form.
inline constexpr double kLambdaTolerance = 1e-9;

/// Local constants of f over `box`.
struct BoundConstants {
  double lipschitz = 0.0;  // L, max spectral norm of df/dx
  double c = 0.0;          // C = L * max |f(y, 0)|
  double lambda = 0.0;     // one-sided Lipschitz constant, any sign
  double gamma = 0.0;      // max |df/dw|
  Box box;
};

struct EstimationOptions {
  std::size_t grid = 9;   // samples per dimension (and for w)
  double safety = 1.05;   // multiplies L, C, gamma; lambda += |lambda| * (safety - 1)
};

/// Grid-sampled estimates. Degenerate dimensions (lo == hi) get a single
/// sample; w is sampled over [-w_radius, w_radius]. lambda is the largest
/// eigenvalue of (J + J^T) / 2, which is the tightest one-sided constant on a
/// convex region.
BoundConstants estimate_constants(const UncertainSystem& sys, const Box& box, const EstimationOptions& opts = {});

struct RadiusParams {
  double eps = 0.0;       // radius of the ball at the start of the step
  double w_extent = 0.0;  // |W| as it enters the closed forms (the interval width)
  BoundConstants constants;
  double lambda_tol = kLambdaTolerance;
};

enum class LambdaBranch { negative, zero, positive };

LambdaBranch select_branch(double lambda, double tol = kLambdaTolerance);

/// Counts radicands that went negative through cancellation and were clamped.
struct DeltaDiagnostics {
  std::size_t clamped = 0;
};

/// Error radius for t in [0, tau] without uncertainty; delta(0) = eps.
double delta_no_uncertainty(const RadiusParams& params, double t, DeltaDiagnostics* diag = nullptr);

/// Error radius for t in [0, tau] under w(.) with extent params.w_extent;
/// delta(0) = eps, and it reduces to delta_no_uncertainty when w_extent = 0.
double delta_with_uncertainty(const RadiusParams& params, double t, DeltaDiagnostics* diag = nullptr);

struct PropagationOptions {
  EstimationOptions estimation;
  double inflation = 0.1;
  double lambda_tol = kLambdaTolerance;
};

struct Propagation {
  double radius = 0.0;
  BoundConstants constants;
};

/// One tube step: constants are estimated on the box around
/// B(center, radius + tau |f(center, 0)|), then the radius is pushed through
/// delta_with_uncertainty with eps = radius and t = tau.
Propagation propagate_radius(const UncertainSystem& sys, const State& center, double radius, double tau,
                             const PropagationOptions& opts = {}, DeltaDiagnostics* diag = nullptr);

}  // namespace tubecert
