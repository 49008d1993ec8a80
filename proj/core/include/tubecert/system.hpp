#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tubecert/expr.hpp"

namespace tubecert {

using State = std::vector<double>;

double norm2(std::span<const double> v);
double distance2(std::span<const double> a, std::span<const double> b);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double width() const { return hi - lo; }
};

/// Axis-aligned box, lo <= hi in every dimension.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> dims);
  static Box point(std::span<const double> x);

  [[nodiscard]] std::size_t dimension() const noexcept { return dims_.size(); }
  [[nodiscard]] const Interval& operator[](std::size_t i) const { return dims_[i]; }
  [[nodiscard]] const std::vector<Interval>& intervals() const noexcept { return dims_; }
  [[nodiscard]] bool contains(const Box& other) const;

 private:
  std::vector<Interval> dims_;
};

/// Closed Euclidean ball.
struct Ball {
  State center;
  double radius = 0.0;

  Ball() = default;
  Ball(State c, double r);
};

/// Box [c - r(1+inflation), c + r(1+inflation)] per dimension.
Box ball_enclosing_box(const Ball& b, double inflation);

/// r_outer - (|c_outer - c_inner| + r_inner). Non-negative iff inner is inside outer.
double inclusion_slack(const Ball& outer, const Ball& inner);

/// Exact Euclidean ball inclusion, tightened by `margin`.
bool ball_contains(const Ball& outer, const Ball& inner, double margin = 0.0);

/// dx/dt = f_p(x): a family indexed by the scalar parameter `p`.
class ParametricSystem {
 public:
  ParametricSystem(std::string name, std::vector<Expr> rhs);
  static ParametricSystem from_strings(std::string name, const std::vector<std::string>& rhs);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return rhs_.size(); }
  [[nodiscard]] std::span<const Expr> rhs() const noexcept { return rhs_; }
  [[nodiscard]] State eval(std::span<const double> x, double p) const;

 private:
  std::string name_;
  std::vector<Expr> rhs_;
};

/// dx/dt = f(x, w) with w(t) in [-w_radius, w_radius].
class UncertainSystem {
 public:
  UncertainSystem(std::vector<Expr> rhs, double w_radius, std::optional<double> p_center = std::nullopt);
  static UncertainSystem from_strings(const std::vector<std::string>& rhs, double w_radius);

  [[nodiscard]] std::size_t dimension() const noexcept { return rhs_.size(); }
  [[nodiscard]] std::span<const Expr> rhs() const noexcept { return rhs_; }
  [[nodiscard]] double w_radius() const noexcept { return w_radius_; }
  [[nodiscard]] std::optional<double> p_center() const noexcept { return p_center_; }

  /// Parameter range covered when this system is a lift; otherwise [-w, w].
  [[nodiscard]] Interval parameter_interval() const;

  [[nodiscard]] State eval(std::span<const double> x, double w) const;
  void eval_into(std::span<const double> x, double w, std::span<double> out) const;
  [[nodiscard]] Matrix jacobian(std::span<const double> x, double w) const;
  [[nodiscard]] std::vector<double> dw_gradient(std::span<const double> x, double w) const;

 private:
  std::vector<Expr> rhs_;
  double w_radius_;
  std::optional<double> p_center_;
};

/// Replaces p by (p0 + w); solutions of f_p for |p - p0| <= w_radius are
/// solutions of the lifted system for a constant w.
UncertainSystem lift(const ParametricSystem& family, double p0, double w_radius);

/// du1/dt = u2, du2/dt = p u2 - p u1^2 u2 - u1.
ParametricSystem van_der_pol();

}  // namespace tubecert
