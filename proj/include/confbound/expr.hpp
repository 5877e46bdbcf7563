#pragma once

// Scalar expressions over the chart coordinates x0..x3.
//
// Grammar (whitespace insensitive):
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom  := number | 'pi' | name | func '(' expr ')' | '(' expr ')'
// '^' is right associative and binds tighter than unary minus, so -x^2 is
// -(x^2). The name r is an alias for x0.

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "confbound/errors.hpp"
#include "confbound/jet.hpp"

namespace confbound {

enum class Op { Const, Pi, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;  // Const only
  int slot = 0;        // Var only
  std::string name;    // Var only
  int var_mask = 0;    // bit k set when the subtree references x<k>
  NodePtr a, b;
};

class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}
  explicit Expr(NodePtr n) : n_(std::move(n)) {}
  Expr(double v) : Expr(constant(v)) {}  // NOLINT: literal promotion

  static Expr constant(double v);
  static Expr pi();
  static Expr var(int slot);
  static Expr var(int slot, std::string name);

  const ExprNode& node() const { return *n_; }
  const NodePtr& ptr() const { return n_; }
  Op op() const { return n_->op; }

  int node_count() const;
  int leaf_count() const;
  bool depends_on(int slot) const;
  bool is_constant() const;
  // True when the tree is a literal zero (after folding of builder helpers).
  bool is_zero() const { return n_->op == Op::Const && n_->value == 0.0; }
  Expr substitute(int slot, const Expr& replacement) const;
  std::string to_string() const;

  double eval(const std::array<double, 4>& x) const;
  template <int N>
  Jet<N> eval(const std::array<Jet<N>, 4>& x) const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  NodePtr n_;
};

// Builders. These fold constant arithmetic and drop additive/multiplicative
// identities, so catalog metrics stay compact.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& b);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr abs(const Expr& a);

inline constexpr std::size_t kMaxExprBytes = 64 * 1024;

// Parses an expression. `names` optionally renames the four coordinates
// (empty entries keep the default x<k>).
Expr parse(std::string_view text, const std::array<std::string, 4>& names = {});

namespace expr_detail {

[[noreturn]] void throw_domain(const char* what, const double* x);

inline double apply(Op op, double v) {
  switch (op) {
    case Op::Sin: return std::sin(v);
    case Op::Cos: return std::cos(v);
    case Op::Tan:
      if (std::cos(v) == 0.0) throw JetDomainError("tan at a pole");
      return std::tan(v);
    case Op::Exp: return std::exp(v);
    case Op::Log:
      if (!(v > 0.0)) throw JetDomainError("log of non-positive value");
      return std::log(v);
    case Op::Sqrt:
      if (v < 0.0) throw JetDomainError("sqrt of negative value");
      return std::sqrt(v);
    case Op::Abs: return std::fabs(v);
    default: return v;
  }
}

template <int N>
Jet<N> apply(Op op, const Jet<N>& v) {
  switch (op) {
    case Op::Sin: return sin(v);
    case Op::Cos: return cos(v);
    case Op::Tan: return tan(v);
    case Op::Exp: return exp(v);
    case Op::Log: return log(v);
    case Op::Sqrt: return sqrt(v);
    case Op::Abs: return abs(v);
    default: return v;
  }
}

inline double power(double a, double p) {
  double ip;
  if (std::modf(p, &ip) != 0.0 && a < 0.0) throw JetDomainError("non-integer power of negative value");
  if (a == 0.0 && p < 0.0) throw JetDomainError("division by zero");
  return std::pow(a, p);
}
template <int N>
Jet<N> power(const Jet<N>& a, double p) {
  return pow(a, p);
}

inline double divide(double a, double b) {
  if (b == 0.0) throw JetDomainError("division by zero");
  return a / b;
}
template <int N>
Jet<N> divide(const Jet<N>& a, const Jet<N>& b) {
  return a / b;
}

inline double exp_log_power(double a, double b) { return power(a, b); }
template <int N>
Jet<N> exp_log_power(const Jet<N>& a, const Jet<N>& b) {
  return pow(a, b);
}

template <class T>
T eval_node(const ExprNode& n, const std::array<T, 4>& x) {
  switch (n.op) {
    case Op::Const: return T(n.value);
    case Op::Pi: return T(std::numbers::pi);
    case Op::Var: return x[n.slot];
    case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::Div: return divide(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::Neg: return -eval_node(*n.a, x);
    case Op::Pow: {
      const ExprNode& e = *n.b;
      if (e.op == Op::Const) return power(eval_node(*n.a, x), e.value);
      if (e.var_mask == 0) {
        std::array<double, 4> none{};
        return power(eval_node(*n.a, x), eval_node(e, none));
      }
      return exp_log_power(eval_node(*n.a, x), eval_node(e, x));
    }
    default: return apply(n.op, eval_node(*n.a, x));
  }
}

}  // namespace expr_detail

template <int N>
Jet<N> Expr::eval(const std::array<Jet<N>, 4>& x) const {
  try {
    return expr_detail::eval_node(*n_, x);
  } catch (const JetDomainError& e) {
    double pt[4] = {x[0].value(), x[1].value(), x[2].value(), x[3].value()};
    expr_detail::throw_domain(e.what(), pt);
  }
}

}  // namespace confbound
