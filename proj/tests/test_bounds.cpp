#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tubecert/bounds.hpp"
#include "tubecert/error.hpp"

using namespace tubecert;

namespace {

RadiusParams make(double eps, double w_extent, double c, double lambda, double gamma) {
  RadiusParams p;
  p.eps = eps;
  p.w_extent = w_extent;
  p.constants.c = c;
  p.constants.lambda = lambda;
  p.constants.gamma = gamma;
  return p;
}

// The closed forms transcribed term by term, in long double. Accurate
// enough to check the production code whenever |lambda t| is not tiny.
long double literal_with(long double eps, long double W, long double C, long double lam, long double g,
                         long double t) {
  const long double e2 = eps * eps;
  const long double hw2 = (W / 2) * (W / 2);
  if (lam < 0) {
    const long double el = std::exp(lam * t);
    const long double a = C * C / (-(lam * lam * lam * lam)) * (-lam * lam * t * t - 2 * lam * t + 2 * el - 2);
    const long double b = (C * g * W / (-lam) * (-lam * t + el - 1) +
                           lam * (g * g * hw2 / (-lam) * (el - 1) + lam * e2 * el)) /
                          (lam * lam);
    return std::sqrt(a + b);
  }
  const long double e3 = std::exp(3 * lam * t);
  const long double l3 = 3 * lam;
  const long double a = C * C / lam * (-9 * lam * lam * t * t - 6 * lam * t + 2 * e3 - 2);
  const long double b = l3 * (C * g * W / lam * (-3 * lam * t + e3 - 1) + l3 * (g * g * hw2 / lam * (e3 - 1) + l3 * e2 * e3));
  return std::sqrt((a + b) / (l3 * l3 * l3));
}

long double literal_without(long double eps, long double C, long double lam, long double t) {
  const long double e2 = eps * eps;
  if (lam < 0) {
    return std::sqrt(e2 * std::exp(lam * t) +
                     C * C / (lam * lam) * (t * t + 2 * t / lam + 2 / (lam * lam) * (1 - std::exp(lam * t))));
  }
  return std::sqrt(e2 * std::exp(3 * lam * t) +
                   C * C / (3 * lam * lam) *
                       (-t * t - 2 * t / (3 * lam) + 2 / (9 * lam * lam) * (std::exp(3 * lam * t) - 1)));
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("branch selection") {
  CHECK(select_branch(-1.0) == LambdaBranch::negative);
  CHECK(select_branch(1.0) == LambdaBranch::positive);
  CHECK(select_branch(0.0) == LambdaBranch::zero);
  CHECK(select_branch(5e-10) == LambdaBranch::zero);
  CHECK(select_branch(-5e-10) == LambdaBranch::zero);
  CHECK(select_branch(kLambdaTolerance) == LambdaBranch::positive);
  CHECK(select_branch(-kLambdaTolerance) == LambdaBranch::negative);
}

TEST_CASE("delta at t = 0 is eps on every branch") {
  for (double lam : {-2.0, 0.0, 1e-12, 2.0}) {
    for (double eps : {0.0, 0.2, 3.0}) {
      const auto p = make(eps, 0.4, 1.3, lam, 0.7);
      CHECK(delta_no_uncertainty(p, 0.0) == doctest::Approx(eps).epsilon(1e-15));
      CHECK(delta_with_uncertainty(p, 0.0) == doctest::Approx(eps).epsilon(1e-15));
    }
  }
}

TEST_CASE("closed-form special cases") {
  CHECK(delta_no_uncertainty(make(0.2, 0.0, 0.0, -1.0, 0.0), 0.5) ==
        doctest::Approx(0.2 * std::exp(-0.25)).epsilon(1e-15));
  CHECK(delta_no_uncertainty(make(1.0, 0.0, 0.0, 0.0, 0.0), 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
  CHECK(delta_no_uncertainty(make(1.0, 0.0, 0.0, 0.5, 0.0), 1.0) == doctest::Approx(std::exp(0.75)).epsilon(1e-15));
  // lambda = 0: eps^2 e^t + C^2 (2e^t - 2 - 2t - t^2)
  const double t = 0.3;
  const double expect = std::sqrt(0.04 * std::exp(t) + 4.0 * (2.0 * std::exp(t) - 2.0 - 2.0 * t - t * t));
  CHECK(delta_no_uncertainty(make(0.2, 0.0, 2.0, 0.0, 0.0), t) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("production formulas match the literal transcription") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double lam = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + 2.8 * u(rng));
    const double t = 0.2 + 0.8 * u(rng);
    const double eps = 2.0 * u(rng);
    const double W = u(rng);
    const double C = 3.0 * u(rng);
    const double g = 2.0 * u(rng);
    const auto p = make(eps, W, C, lam, g);
    CHECK(rel_close(delta_with_uncertainty(p, t), static_cast<double>(literal_with(eps, W, C, lam, g, t)), 1e-12));
    CHECK(rel_close(delta_no_uncertainty(p, t), static_cast<double>(literal_without(eps, C, lam, t)), 1e-12));
  }
}

TEST_CASE("w_extent = 0 reduces to the uncertainty-free radius") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    for (double sign : {-1.0, 0.0, 1.0}) {
      const auto p = make(u(rng), 0.0, 3.0 * u(rng), sign * (0.01 + 3.0 * u(rng)), 2.0 * u(rng));
      const double t = 1e-3 + u(rng) * 0.5;
      CHECK(rel_close(delta_with_uncertainty(p, t), delta_no_uncertainty(p, t), 1e-12));
    }
  }
}

TEST_CASE("monotone in eps and in the uncertainty extent") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double lam = (u(rng) - 0.5) * 6.0;
    const double C = 3.0 * u(rng);
    const double g = 2.0 * u(rng);
    const double t = 0.1 * u(rng);
    const double e1 = u(rng);
    const double e2 = e1 + u(rng);
    const double W1 = u(rng);
    const double W2 = W1 + u(rng);
    CHECK(delta_with_uncertainty(make(e1, W1, C, lam, g), t) <= delta_with_uncertainty(make(e2, W1, C, lam, g), t));
    CHECK(delta_with_uncertainty(make(e1, W1, C, lam, g), t) <= delta_with_uncertainty(make(e1, W2, C, lam, g), t));
    CHECK(delta_no_uncertainty(make(e1, 0.0, C, lam, g), t) <= delta_no_uncertainty(make(e2, 0.0, C, lam, g), t));
  }
}

TEST_CASE("no radicand is clamped on ordinary inputs") {
  DeltaDiagnostics diag;
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const auto p = make(u(rng), u(rng), 3.0 * u(rng), (u(rng) - 0.5) * 1e-6, u(rng));
    (void)delta_with_uncertainty(p, 1e-3 * u(rng), &diag);
    (void)delta_no_uncertainty(p, 1e-3 * u(rng), &diag);
  }
  CHECK(diag.clamped == 0);
}

TEST_CASE("invalid radius parameters") {
  CHECK_THROWS_AS((void)delta_with_uncertainty(make(-1.0, 0.0, 0.0, 0.0, 0.0), 0.1), Error);
  CHECK_THROWS_AS((void)delta_with_uncertainty(make(1.0, -1.0, 0.0, 0.0, 0.0), 0.1), Error);
  CHECK_THROWS_AS((void)delta_no_uncertainty(make(1.0, 0.0, 0.0, 0.0, 0.0), -0.1), Error);
}

TEST_CASE("bound dominates the exact error of dx/dt = -x + w") {
  const double w_radius = 0.1;
  const double eps = 0.1;
  const double tau = 0.01;
  const auto sys = UncertainSystem::from_strings({"-x1 + w"}, w_radius);
  EstimationOptions opts;
  for (double x0 : {-2.0, -0.3, 0.0, 0.05, 1.0, 3.0}) {
    const std::vector<double> xs{x0};
    RadiusParams p;
    p.eps = eps;
    p.w_extent = 2.0 * w_radius;
    p.constants = estimate_constants(sys, Box::point(xs), opts);
    for (double t : {tau / 4.0, tau / 2.0, tau}) {
      const double euler = x0 - t * x0;
      double worst = 0.0;
      for (int k = 0; k <= 200; ++k) {
        const double w = -w_radius + 2.0 * w_radius * k / 200.0;
        for (double y0 : {x0 - eps, x0 + eps}) {
          const double exact = w + (y0 - w) * std::exp(-t);
          worst = std::max(worst, std::abs(exact - euler));
        }
      }
      CHECK(delta_with_uncertainty(p, t) >= worst);
    }
  }
}

TEST_CASE("constants of a linear system") {
  const auto sys = UncertainSystem::from_strings({"-x1 + 2*x2", "-3*x2"}, 0.0);
  const Box box({Interval{0.0, 1.0}, Interval{0.0, 1.0}});
  EstimationOptions opts;
  opts.safety = 1.0;
  const auto k = estimate_constants(sys, box, opts);
  const double lip = std::sqrt(7.0 + std::sqrt(40.0));
  CHECK(k.lipschitz == doctest::Approx(lip).epsilon(1e-12));
  CHECK(k.lambda == doctest::Approx(-2.0 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(k.gamma == 0.0);
  CHECK(k.c == doctest::Approx(lip * std::sqrt(13.0)).epsilon(1e-12));
}

TEST_CASE("safety factor") {
  const auto sys = UncertainSystem::from_strings({"-x1 + w"}, 0.5);
  const std::vector<double> x{2.0};
  const auto k = estimate_constants(sys, Box::point(x), EstimationOptions{9, 1.05});
  CHECK(k.lipschitz == doctest::Approx(1.05));
  CHECK(k.lambda == doctest::Approx(-0.95));
  CHECK(k.gamma == doctest::Approx(1.05));
  CHECK(k.c == doctest::Approx(1.05 * 2.0));
  CHECK_THROWS_AS(estimate_constants(sys, Box::point(x), EstimationOptions{1, 1.0}), Error);
}

TEST_CASE("van der Pol one-sided constant at the origin") {
  const auto sys = lift(van_der_pol(), 1.1, 0.0);
  const std::vector<double> origin{0.0, 0.0};
  const auto k = estimate_constants(sys, Box::point(origin), EstimationOptions{9, 1.0});
  CHECK(k.lambda == doctest::Approx(1.1).epsilon(1e-14));

  // sampled quotient <f(y) - f(x), y - x> / |y - x|^2 near the origin
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e-4, 1e-4);
  double best = -1e9;
  for (int s = 0; s < 20000; ++s) {
    const std::vector<double> a{u(rng), u(rng)};
    const std::vector<double> b{u(rng), u(rng)};
    const auto fa = sys.eval(a, 0.0);
    const auto fb = sys.eval(b, 0.0);
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double q = ((fb[0] - fa[0]) * dx + (fb[1] - fa[1]) * dy) / (dx * dx + dy * dy);
    best = std::max(best, q);
  }
  CHECK(best <= 1.1 + 1e-3);
  CHECK(best >= 1.1 - 1e-2);
}

TEST_CASE("gamma of the lifted van der Pol system") {
  const auto sys = lift(van_der_pol(), 1.1, 0.5);
  const std::vector<double> x{0.0, 1.0};
  const auto k = estimate_constants(sys, Box::point(x), EstimationOptions{9, 1.0});
  CHECK(k.gamma >= 1.0);
  CHECK(k.gamma == doctest::Approx(1.0));
}

TEST_CASE("constants grow with the box on aligned lattices") {
  const auto sys = lift(van_der_pol(), 1.1, 0.5);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int s = 0; s < 20; ++s) {
    const double a0 = u(rng);
    const double a1 = u(rng);
    const double h = 0.25 + 0.25 * std::abs(u(rng));
    const Box sub({Interval{a0, a0 + h}, Interval{a1, a1 + h}});
    const Box big({Interval{a0, a0 + 2 * h}, Interval{a1, a1 + 2 * h}});
    // grid g on sub is a subset of grid 2g-1 on big; the w grid nests the same way
    const auto ks = estimate_constants(sys, sub, EstimationOptions{5, 1.0});
    const auto kb = estimate_constants(sys, big, EstimationOptions{9, 1.0});
    CHECK(ks.lipschitz <= kb.lipschitz);
    CHECK(ks.lambda <= kb.lambda);
    CHECK(ks.gamma <= kb.gamma);
    CHECK(ks.c <= kb.c);
  }
}

TEST_CASE("propagation") {
  SUBCASE("zero field grows by e^{tau/2}") {
    const auto sys = UncertainSystem::from_strings({"0", "0"}, 0.0);
    const auto pr = propagate_radius(sys, {1.0, 2.0}, 0.3, 0.01);
    CHECK(pr.radius == doctest::Approx(0.3 * std::exp(0.005)).epsilon(1e-15));
    CHECK(propagate_radius(sys, {1.0, 2.0}, 0.0, 0.01).radius == 0.0);
  }
  SUBCASE("contraction shrinks") {
    const auto sys = UncertainSystem::from_strings({"-x1", "-x2"}, 0.0);
    const auto pr = propagate_radius(sys, {1.0, 0.0}, 0.5, 1e-3);
    CHECK(pr.radius < 0.5);
    CHECK(pr.constants.lambda < 0.0);
  }
  SUBCASE("the local box covers the step") {
    const auto sys = lift(van_der_pol(), 1.1, 0.5);
    const State c{1.70177925, -0.12841500};
    const auto pr = propagate_radius(sys, c, 0.2, 1e-3);
    CHECK(pr.constants.box.contains(ball_enclosing_box(Ball(c, 0.2), 0.0)));
    CHECK(pr.radius > 0.2);
    CHECK(std::isfinite(pr.radius));
  }
  SUBCASE("invalid inputs") {
    const auto sys = UncertainSystem::from_strings({"0"}, 0.0);
    CHECK_THROWS_AS(propagate_radius(sys, {0.0}, -1.0, 0.1), Error);
    CHECK_THROWS_AS(propagate_radius(sys, {0.0}, 1.0, 0.0), Error);
  }
}
