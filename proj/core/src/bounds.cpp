#include "tubecert/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "tubecert/error.hpp"

namespace tubecert {

namespace {

std::vector<double> sample_axis(double lo, double hi, std::size_t grid) {
  if (lo == hi) {
    return {lo};
  }
  std::vector<double> pts(grid);
  const double h = (hi - lo) / static_cast<double>(grid - 1);
  for (std::size_t k = 0; k < grid; ++k) {
    pts[k] = k + 1 == grid ? hi : lo + static_cast<double>(k) * h;
  }
  return pts;
}

double max_symmetric_eigenvalue(const Matrix& jac) {
  const auto n = static_cast<Eigen::Index>(jac.n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> j(jac.data.data(), n, n);
  const Eigen::MatrixXd sym = 0.5 * (j + j.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double spectral_norm(const Matrix& jac) {
  const auto n = static_cast<Eigen::Index>(jac.n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> j(jac.data.data(), n, n);
  const Eigen::MatrixXd gram = j.transpose() * j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// e^x - 1 - x, accurate for small |x|.
double expm1_minus_x(double x) {
  if (std::abs(x) < 0.5) {
    double term = x * x / 2.0;
    double sum = term;
    for (int k = 3; k < 40; ++k) {
      term *= x / k;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) {
        break;
      }
    }
    return sum;
  }
  return std::expm1(x) - x;
}

// 2 e^x - 2 - 2x - x^2, accurate for small |x|.
double two_expm1_minus_quadratic(double x) {
  if (std::abs(x) < 1.0) {
    double term = x * x * x / 6.0;
    double sum = term;
    for (int k = 4; k < 60; ++k) {
      term *= x / k;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) {
        break;
      }
    }
    return 2.0 * sum;
  }
  return 2.0 * (std::expm1(x) - x) - x * x;
}

double finish(double radicand, DeltaDiagnostics* diag) {
  if (radicand < 0.0) {
    if (diag != nullptr) {
      ++diag->clamped;
    }
    return 0.0;
  }
  return std::sqrt(radicand);
}

void check_params(const RadiusParams& params, double t) {
  if (!(params.eps >= 0.0) || !(params.w_extent >= 0.0) || !(t >= 0.0)) {
    throw Error("radius parameters must be non-negative");
  }
}

}  // namespace

BoundConstants estimate_constants(const UncertainSystem& sys, const Box& box, const EstimationOptions& opts) {
  if (opts.grid < 2) {
    throw Error("estimation grid needs at least 2 samples per dimension");
  }
  if (box.dimension() != sys.dimension()) {
    throw Error("box dimension does not match system");
  }
  const std::size_t n = sys.dimension();
  std::vector<std::vector<double>> axes(n);
  for (std::size_t d = 0; d < n; ++d) {
    axes[d] = sample_axis(box[d].lo, box[d].hi, opts.grid);
  }
  const double wr = sys.w_radius();
  const std::vector<double> ws = sample_axis(-wr, wr, opts.grid);

  double lip = 0.0;
  double lambda = -std::numeric_limits<double>::infinity();
  double gamma = 0.0;
  double fmax = 0.0;

  std::vector<std::size_t> idx(n, 0);
  State y(n);
  State f(n);
  for (;;) {
    for (std::size_t d = 0; d < n; ++d) {
      y[d] = axes[d][idx[d]];
    }
    sys.eval_into(y, 0.0, f);
    fmax = std::max(fmax, norm2(f));
    for (double w : ws) {
      const Matrix jac = sys.jacobian(y, w);
      lip = std::max(lip, spectral_norm(jac));
      lambda = std::max(lambda, max_symmetric_eigenvalue(jac));
      gamma = std::max(gamma, norm2(sys.dw_gradient(y, w)));
    }
    std::size_t d = 0;
    while (d < n && ++idx[d] == axes[d].size()) {
      idx[d] = 0;
      ++d;
    }
    if (d == n) {
      break;
    }
  }

  BoundConstants k;
  k.lipschitz = opts.safety * lip;
  k.c = opts.safety * (lip * fmax);
  k.lambda = lambda + std::abs(lambda) * (opts.safety - 1.0);
  k.gamma = opts.safety * gamma;
  k.box = box;
  return k;
}

LambdaBranch select_branch(double lambda, double tol) {
  if (lambda <= -tol) {
    return LambdaBranch::negative;
  }
  if (lambda >= tol) {
    return LambdaBranch::positive;
  }
  return LambdaBranch::zero;
}

double delta_no_uncertainty(const RadiusParams& params, double t, DeltaDiagnostics* diag) {
  check_params(params, t);
  const double eps2 = params.eps * params.eps;
  const double c2 = params.constants.c * params.constants.c;
  const double lam = params.constants.lambda;
  switch (select_branch(lam, params.lambda_tol)) {
    case LambdaBranch::negative: {
      // C^2/lambda^2 (t^2 + 2t/lambda + 2/lambda^2 (1 - e^{lambda t}))
      const double x = lam * t;
      const double lam2 = lam * lam;
      return finish(eps2 * std::exp(x) - c2 / (lam2 * lam2) * two_expm1_minus_quadratic(x), diag);
    }
    case LambdaBranch::positive: {
      // C^2/(3 lambda^2) (-t^2 - 2t/(3 lambda) + 2/(9 lambda^2) (e^{3 lambda t} - 1))
      const double x = 3.0 * lam * t;
      const double lam2 = lam * lam;
      return finish(eps2 * std::exp(x) + c2 / (27.0 * lam2 * lam2) * two_expm1_minus_quadratic(x), diag);
    }
    case LambdaBranch::zero:
      break;
  }
  return finish(eps2 * std::exp(t) + c2 * two_expm1_minus_quadratic(t), diag);
}

double delta_with_uncertainty(const RadiusParams& params, double t, DeltaDiagnostics* diag) {
  check_params(params, t);
  const double eps2 = params.eps * params.eps;
  const double c = params.constants.c;
  const double c2 = c * c;
  const double g = params.constants.gamma;
  const double wext = params.w_extent;
  const double hw2 = (wext / 2.0) * (wext / 2.0);
  const double lam = params.constants.lambda;

  switch (select_branch(lam, params.lambda_tol)) {
    case LambdaBranch::negative: {
      const double x = lam * t;
      const double lam2 = lam * lam;
      const double inner = g * g * hw2 / (-lam) * std::expm1(x) + lam * eps2 * std::exp(x);
      const double mid = c * g * wext / (-lam) * expm1_minus_x(x) + lam * inner;
      return finish(c2 / (-(lam2 * lam2)) * two_expm1_minus_quadratic(x) + mid / lam2, diag);
    }
    case LambdaBranch::positive: {
      const double x = 3.0 * lam * t;
      const double l3 = 3.0 * lam;
      const double inner = g * g * hw2 / lam * std::expm1(x) + l3 * eps2 * std::exp(x);
      const double mid = c * g * wext / lam * expm1_minus_x(x) + l3 * inner;
      const double outer = c2 / lam * two_expm1_minus_quadratic(x) + l3 * mid;
      return finish(outer / (l3 * l3 * l3), diag);
    }
    case LambdaBranch::zero:
      break;
  }
  const double inner = g * g * hw2 * std::expm1(t) + eps2 * std::exp(t);
  const double mid = c * g * wext * expm1_minus_x(t) + inner;
  return finish(c2 * two_expm1_minus_quadratic(t) + mid, diag);
}

Propagation propagate_radius(const UncertainSystem& sys, const State& center, double radius, double tau,
                             const PropagationOptions& opts, DeltaDiagnostics* diag) {
  if (!(radius >= 0.0) || !(tau > 0.0)) {
    throw Error("propagate_radius needs radius >= 0 and tau > 0");
  }
  const double reach = radius + tau * norm2(sys.eval(center, 0.0));
  const Box box = ball_enclosing_box(Ball(center, reach), opts.inflation);
  Propagation out;
  out.constants = estimate_constants(sys, box, opts.estimation);
  RadiusParams params;
  params.eps = radius;
  params.w_extent = 2.0 * sys.w_radius();
  params.constants = out.constants;
  params.lambda_tol = opts.lambda_tol;
  out.radius = delta_with_uncertainty(params, tau, diag);
  return out;
}

}  // namespace tubecert
