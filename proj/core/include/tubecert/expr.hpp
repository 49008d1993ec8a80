#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tubecert {

/// Value plus first derivative along one seeded direction.
struct Dual {
  double value = 0.0;
  double derivative = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v, double d = 0.0) : value(v), derivative(d) {}  // NOLINT(google-explicit-constructor)
};

constexpr Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.derivative + b.derivative}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.derivative - b.derivative}; }
constexpr Dual operator-(Dual a) { return {-a.value, -a.derivative}; }
constexpr Dual operator*(Dual a, Dual b) {
  return {a.value * b.value, a.derivative * b.value + a.value * b.derivative};
}
constexpr Dual operator/(Dual a, Dual b) {
  return {a.value / b.value, (a.derivative * b.value - a.value * b.derivative) / (b.value * b.value)};
}
inline Dual sin(Dual a) { return {std::sin(a.value), a.derivative * std::cos(a.value)}; }
inline Dual cos(Dual a) { return {std::cos(a.value), -a.derivative * std::sin(a.value)}; }
inline Dual exp(Dual a) {
  const double e = std::exp(a.value);
  return {e, a.derivative * e};
}
inline Dual sqrt(Dual a) {
  const double s = std::sqrt(a.value);
  return {s, a.derivative / (2.0 * s)};
}

/// Row-major square matrix, used for Jacobians.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> data;

  Matrix() = default;
  explicit Matrix(std::size_t dim) : n(dim), data(dim * dim, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

/// Immutable expression tree over state variables x1..xn, the parameter `p`
/// and the uncertainty `w`. Nodes live in a flat arena; children precede
/// their parent, and the last node is the root.
///
/// Grammar:
///   expr    := term  (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' integer)*
///   primary := number | 'x' digits | 'p' | 'w'
///            | ('sin' | 'cos' | 'exp' | 'sqrt') '(' expr ')' | '(' expr ')'
class Expr {
 public:
  enum class Op : std::uint8_t {
    constant,
    variable,
    parameter,
    uncertainty,
    neg,
    sin,
    cos,
    exp,
    sqrt,
    add,
    sub,
    mul,
    div,
    pow,
  };

  struct Node {
    Op op = Op::constant;
    double value = 0.0;        // constant
    std::uint32_t index = 0;   // variable index (0-based) or integer exponent
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
    std::size_t offset = 0;    // position in the source text
  };

  /// Throws ParseError on malformed text, unknown identifiers, or variable
  /// indices outside 1..dimension.
  static Expr parse(std::string_view text, std::size_t dimension);

  static Expr constant(double value, std::size_t dimension);

  [[nodiscard]] double eval(std::span<const double> x, double p, double w) const;
  [[nodiscard]] Dual eval(std::span<const Dual> x, Dual p, Dual w) const;

  /// Fully parenthesized text; parsing it back gives an identically
  /// evaluating tree.
  [[nodiscard]] std::string to_string() const;

  /// Every `p` becomes `(p0 + w)`.
  [[nodiscard]] Expr substitute_parameter(double p0) const;

  [[nodiscard]] bool uses(Op op) const;
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] std::span<const Node> nodes() const noexcept { return nodes_; }

 private:
  Expr() = default;
  template <class T>
  T eval_impl(std::span<const T> x, T p, T w) const;
  void print(std::int32_t id, std::string& out) const;

  std::vector<Node> nodes_;
  std::size_t dimension_ = 0;
  std::string source_;

  friend class ExprParser;
};

/// Entry (i, j) = d f_i / d x_j by one forward-mode pass per column.
Matrix jacobian(std::span<const Expr> f, std::span<const double> x, double p, double w);

/// d f_i / d w, single forward-mode pass.
std::vector<double> dw_gradient(std::span<const Expr> f, std::span<const double> x, double p, double w);

}  // namespace tubecert
