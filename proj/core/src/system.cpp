#include "tubecert/system.hpp"

#include <cmath>
#include <stdexcept>

#include "tubecert/error.hpp"

namespace tubecert {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    s += x * x;
  }
  return std::sqrt(s);
}

double distance2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Box::Box(std::vector<Interval> dims) : dims_(std::move(dims)) {
  for (const Interval& iv : dims_) {
    if (!(iv.lo <= iv.hi)) {
      throw Error("box interval with lo > hi");
    }
  }
}

Box Box::point(std::span<const double> x) {
  std::vector<Interval> dims;
  dims.reserve(x.size());
  for (double v : x) {
    dims.push_back({v, v});
  }
  return Box(std::move(dims));
}

bool Box::contains(const Box& other) const {
  if (other.dimension() != dimension()) {
    return false;
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (other.dims_[i].lo < dims_[i].lo || other.dims_[i].hi > dims_[i].hi) {
      return false;
    }
  }
  return true;
}

Ball::Ball(State c, double r) : center(std::move(c)), radius(r) {
  if (!(r >= 0.0)) {
    throw Error("ball radius must be non-negative");
  }
}

Box ball_enclosing_box(const Ball& b, double inflation) {
  if (!(inflation >= 0.0)) {
    throw Error("inflation must be non-negative");
  }
  const double half = b.radius * (1.0 + inflation);
  std::vector<Interval> dims;
  dims.reserve(b.center.size());
  for (double c : b.center) {
    dims.push_back({c - half, c + half});
  }
  return Box(std::move(dims));
}

double inclusion_slack(const Ball& outer, const Ball& inner) {
  if (outer.center.size() != inner.center.size()) {
    throw Error("ball dimension mismatch");
  }
  return outer.radius - (distance2(outer.center, inner.center) + inner.radius);
}

bool ball_contains(const Ball& outer, const Ball& inner, double margin) {
  if (outer.center.size() != inner.center.size()) {
    throw Error("ball dimension mismatch");
  }
  return distance2(outer.center, inner.center) + inner.radius <= outer.radius - margin;
}

ParametricSystem::ParametricSystem(std::string name, std::vector<Expr> rhs)
    : name_(std::move(name)), rhs_(std::move(rhs)) {
  if (rhs_.empty()) {
    throw Error("system needs at least one equation");
  }
  for (const Expr& e : rhs_) {
    if (e.dimension() != rhs_.size()) {
      throw Error("equation dimension does not match system dimension");
    }
    if (e.uses(Expr::Op::uncertainty)) {
      throw Error("parametric system may not reference w: " + e.source());
    }
  }
}

ParametricSystem ParametricSystem::from_strings(std::string name, const std::vector<std::string>& rhs) {
  std::vector<Expr> exprs;
  exprs.reserve(rhs.size());
  for (const std::string& s : rhs) {
    exprs.push_back(Expr::parse(s, rhs.size()));
  }
  return {std::move(name), std::move(exprs)};
}

State ParametricSystem::eval(std::span<const double> x, double p) const {
  State out(rhs_.size());
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    out[i] = rhs_[i].eval(x, p, 0.0);
  }
  return out;
}

UncertainSystem::UncertainSystem(std::vector<Expr> rhs, double w_radius, std::optional<double> p_center)
    : rhs_(std::move(rhs)), w_radius_(w_radius), p_center_(p_center) {
  if (!(w_radius_ >= 0.0)) {
    throw Error("w_radius must be non-negative");
  }
  if (rhs_.empty()) {
    throw Error("system needs at least one equation");
  }
  for (const Expr& e : rhs_) {
    if (e.dimension() != rhs_.size()) {
      throw Error("equation dimension does not match system dimension");
    }
    if (e.uses(Expr::Op::parameter)) {
      throw Error("uncertain system may not reference p (lift it first): " + e.source());
    }
  }
}

UncertainSystem UncertainSystem::from_strings(const std::vector<std::string>& rhs, double w_radius) {
  std::vector<Expr> exprs;
  exprs.reserve(rhs.size());
  for (const std::string& s : rhs) {
    exprs.push_back(Expr::parse(s, rhs.size()));
  }
  return {std::move(exprs), w_radius};
}

Interval UncertainSystem::parameter_interval() const {
  const double c = p_center_.value_or(0.0);
  return {c - w_radius_, c + w_radius_};
}

State UncertainSystem::eval(std::span<const double> x, double w) const {
  State out(rhs_.size());
  eval_into(x, w, out);
  return out;
}

void UncertainSystem::eval_into(std::span<const double> x, double w, std::span<double> out) const {
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    out[i] = rhs_[i].eval(x, 0.0, w);
  }
}

Matrix UncertainSystem::jacobian(std::span<const double> x, double w) const {
  return tubecert::jacobian(rhs_, x, 0.0, w);
}

std::vector<double> UncertainSystem::dw_gradient(std::span<const double> x, double w) const {
  return tubecert::dw_gradient(rhs_, x, 0.0, w);
}

UncertainSystem lift(const ParametricSystem& family, double p0, double w_radius) {
  std::vector<Expr> rhs;
  rhs.reserve(family.dimension());
  for (const Expr& e : family.rhs()) {
    rhs.push_back(e.substitute_parameter(p0));
  }
  return {std::move(rhs), w_radius, p0};
}

ParametricSystem van_der_pol() {
  return ParametricSystem::from_strings("vdp", {"x2", "p*x2 - p*x1^2*x2 - x1"});
}

}  // namespace tubecert
