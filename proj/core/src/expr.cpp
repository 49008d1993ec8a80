#include "tubecert/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "tubecert/error.hpp"

namespace tubecert {

namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t dimension) : text_(text), dimension_(dimension) {}

  Expr run() {
    Expr e;
    e.dimension_ = dimension_;
    e.source_ = std::string(text_);
    nodes_ = &e.nodes_;
    skip_space();
    if (pos_ >= text_.size()) {
      throw ParseError("empty expression", pos_);
    }
    parse_expr();
    skip_space();
    if (pos_ < text_.size()) {
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  std::int32_t push(Expr::Node n) {
    nodes_->push_back(n);
    return static_cast<std::int32_t>(nodes_->size() - 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::int32_t parse_expr() {
    std::int32_t lhs = parse_term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = push({.op = Expr::Op::add, .lhs = lhs, .rhs = parse_term(), .offset = at});
      } else if (accept('-')) {
        lhs = push({.op = Expr::Op::sub, .lhs = lhs, .rhs = parse_term(), .offset = at});
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = push({.op = Expr::Op::mul, .lhs = lhs, .rhs = parse_unary(), .offset = at});
      } else if (accept('/')) {
        lhs = push({.op = Expr::Op::div, .lhs = lhs, .rhs = parse_unary(), .offset = at});
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) {
      return push({.op = Expr::Op::neg, .lhs = parse_unary(), .offset = at});
    }
    if (accept('+')) {
      return parse_unary();
    }
    return parse_power();
  }

  std::int32_t parse_power() {
    std::int32_t base = parse_primary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (!accept('^')) {
        return base;
      }
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
        ++pos_;
      }
      if (start == pos_) {
        throw ParseError("exponent must be a non-negative integer literal", start);
      }
      std::uint32_t k = 0;
      auto res = std::from_chars(text_.data() + start, text_.data() + pos_, k);
      if (res.ec != std::errc{} || k > 64) {
        throw ParseError("exponent out of range", start);
      }
      base = push({.op = Expr::Op::pow, .index = k, .lhs = base, .offset = at});
    }
  }

  std::int32_t parse_primary() {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) {
      throw ParseError("expected operand", pos_);
    }
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const std::int32_t inner = parse_expr();
      if (!accept(')')) {
        throw ParseError("expected ')'", pos_);
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
      std::size_t end = pos_;
      while (end < text_.size() && is_ident_char(text_[end])) {
        ++end;
      }
      const std::string_view ident = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (ident == "p") {
        return push({.op = Expr::Op::parameter, .offset = at});
      }
      if (ident == "w") {
        return push({.op = Expr::Op::uncertainty, .offset = at});
      }
      if (ident.size() >= 2 && ident[0] == 'x' && all_digits(ident.substr(1))) {
        std::size_t idx = 0;
        std::from_chars(ident.data() + 1, ident.data() + ident.size(), idx);
        if (idx < 1 || idx > dimension_) {
          throw ParseError("variable " + std::string(ident) + " out of range for dimension " +
                               std::to_string(dimension_),
                           at);
        }
        return push({.op = Expr::Op::variable, .index = static_cast<std::uint32_t>(idx - 1), .offset = at});
      }
      Expr::Op fn{};
      if (ident == "sin") {
        fn = Expr::Op::sin;
      } else if (ident == "cos") {
        fn = Expr::Op::cos;
      } else if (ident == "exp") {
        fn = Expr::Op::exp;
      } else if (ident == "sqrt") {
        fn = Expr::Op::sqrt;
      } else {
        throw ParseError("unknown identifier '" + std::string(ident) + "'", at);
      }
      if (!accept('(')) {
        throw ParseError("expected '(' after " + std::string(ident), pos_);
      }
      const std::int32_t arg = parse_expr();
      if (!accept(')')) {
        throw ParseError("expected ')'", pos_);
      }
      return push({.op = fn, .lhs = arg, .offset = at});
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::int32_t parse_number() {
    const std::size_t at = pos_;
    double v = 0.0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v,
                               std::chars_format::general);
    if (res.ec != std::errc{}) {
      throw ParseError("malformed number", at);
    }
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    if (pos_ < text_.size() && is_ident_char(text_[pos_])) {
      throw ParseError("malformed number", at);
    }
    return push({.op = Expr::Op::constant, .value = v, .offset = at});
  }

  static bool all_digits(std::string_view s) {
    for (char c : s) {
      if (std::isdigit(static_cast<unsigned char>(c)) == 0) {
        return false;
      }
    }
    return !s.empty();
  }

  std::string_view text_;
  std::size_t dimension_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node>* nodes_ = nullptr;
};

Expr Expr::parse(std::string_view text, std::size_t dimension) { return ExprParser(text, dimension).run(); }

Expr Expr::constant(double value, std::size_t dimension) {
  Expr e;
  e.dimension_ = dimension;
  e.nodes_.push_back({.op = Op::constant, .value = value});
  e.source_ = format_double(value);
  return e;
}

namespace {

inline double value_of(double v) { return v; }
inline double value_of(const Dual& d) { return d.value; }

}  // namespace

template <class T>
T Expr::eval_impl(std::span<const T> x, T p, T w) const {
  // Children always precede parents, so one forward sweep evaluates the tree.
  std::vector<T> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::constant:
        v[i] = T(n.value);
        break;
      case Op::variable:
        v[i] = x[n.index];
        break;
      case Op::parameter:
        v[i] = p;
        break;
      case Op::uncertainty:
        v[i] = w;
        break;
      case Op::neg:
        v[i] = -v[n.lhs];
        break;
      case Op::sin: {
        using std::sin;
        v[i] = sin(v[n.lhs]);
        break;
      }
      case Op::cos: {
        using std::cos;
        v[i] = cos(v[n.lhs]);
        break;
      }
      case Op::exp: {
        using std::exp;
        v[i] = exp(v[n.lhs]);
        break;
      }
      case Op::sqrt: {
        using std::sqrt;
        const double arg = value_of(v[n.lhs]);
        if (arg < 0.0 || (arg == 0.0 && !std::is_same_v<T, double>)) {
          throw DomainError(arg < 0.0 ? "sqrt of negative value" : "sqrt not differentiable at 0", n.offset);
        }
        v[i] = sqrt(v[n.lhs]);
        break;
      }
      case Op::add:
        v[i] = v[n.lhs] + v[n.rhs];
        break;
      case Op::sub:
        v[i] = v[n.lhs] - v[n.rhs];
        break;
      case Op::mul:
        v[i] = v[n.lhs] * v[n.rhs];
        break;
      case Op::div:
        if (value_of(v[n.rhs]) == 0.0) {
          throw DomainError("division by zero", n.offset);
        }
        v[i] = v[n.lhs] / v[n.rhs];
        break;
      case Op::pow: {
        T acc(1.0);
        for (std::uint32_t k = 0; k < n.index; ++k) {
          acc = acc * v[n.lhs];
        }
        v[i] = acc;
        break;
      }
    }
  }
  return v.back();
}

double Expr::eval(std::span<const double> x, double p, double w) const { return eval_impl<double>(x, p, w); }

Dual Expr::eval(std::span<const Dual> x, Dual p, Dual w) const { return eval_impl<Dual>(x, p, w); }

void Expr::print(std::int32_t id, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  auto binary = [&](const char* op) {
    out += '(';
    print(n.lhs, out);
    out += op;
    print(n.rhs, out);
    out += ')';
  };
  auto call = [&](const char* fn) {
    out += fn;
    out += '(';
    print(n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::constant:
      if (std::signbit(n.value)) {
        out += "(-" + format_double(-n.value) + ")";
      } else {
        out += format_double(n.value);
      }
      break;
    case Op::variable:
      out += "x" + std::to_string(n.index + 1);
      break;
    case Op::parameter:
      out += 'p';
      break;
    case Op::uncertainty:
      out += 'w';
      break;
    case Op::neg:
      out += "(-";
      print(n.lhs, out);
      out += ')';
      break;
    case Op::sin:
      call("sin");
      break;
    case Op::cos:
      call("cos");
      break;
    case Op::exp:
      call("exp");
      break;
    case Op::sqrt:
      call("sqrt");
      break;
    case Op::add:
      binary(" + ");
      break;
    case Op::sub:
      binary(" - ");
      break;
    case Op::mul:
      binary(" * ");
      break;
    case Op::div:
      binary(" / ");
      break;
    case Op::pow:
      out += '(';
      print(n.lhs, out);
      out += '^' + std::to_string(n.index) + ')';
      break;
  }
}

std::string Expr::to_string() const {
  std::string out;
  print(static_cast<std::int32_t>(nodes_.size() - 1), out);
  return out;
}

Expr Expr::substitute_parameter(double p0) const {
  Expr e;
  e.dimension_ = dimension_;
  e.source_ = source_;
  std::vector<std::int32_t> remap(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node n = nodes_[i];
    if (n.lhs >= 0) {
      n.lhs = remap[static_cast<std::size_t>(n.lhs)];
    }
    if (n.rhs >= 0) {
      n.rhs = remap[static_cast<std::size_t>(n.rhs)];
    }
    if (n.op == Op::parameter) {
      e.nodes_.push_back({.op = Op::constant, .value = p0, .offset = n.offset});
      const auto c = static_cast<std::int32_t>(e.nodes_.size() - 1);
      e.nodes_.push_back({.op = Op::uncertainty, .offset = n.offset});
      const auto u = static_cast<std::int32_t>(e.nodes_.size() - 1);
      n = {.op = Op::add, .lhs = c, .rhs = u, .offset = n.offset};
    }
    e.nodes_.push_back(n);
    remap[i] = static_cast<std::int32_t>(e.nodes_.size() - 1);
  }
  return e;
}

bool Expr::uses(Op op) const {
  for (const Node& n : nodes_) {
    if (n.op == op) {
      return true;
    }
  }
  return false;
}

Matrix jacobian(std::span<const Expr> f, std::span<const double> x, double p, double w) {
  const std::size_t n = x.size();
  Matrix jac(n);
  std::vector<Dual> seeded(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      seeded[k] = Dual(x[k], k == j ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      jac(i, j) = f[i].eval(seeded, Dual(p), Dual(w)).derivative;
    }
  }
  return jac;
}

std::vector<double> dw_gradient(std::span<const Expr> f, std::span<const double> x, double p, double w) {
  std::vector<Dual> xs(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    xs[k] = Dual(x[k]);
  }
  std::vector<double> grad(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    grad[i] = f[i].eval(xs, Dual(p), Dual(w, 1.0)).derivative;
  }
  return grad;
}

}  // namespace tubecert
