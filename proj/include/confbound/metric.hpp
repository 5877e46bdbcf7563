#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confbound/expr.hpp"
#include "confbound/program.hpp"

namespace confbound {

using Point = std::array<double, 4>;

struct Box {
  Point lo{};
  Point hi{};
  bool contains(const Point& x, double slack = 1e-12) const {
    for (int k = 0; k < 4; ++k) {
      if (x[k] < lo[k] - slack || x[k] > hi[k] + slack) return false;
    }
    return true;
  }
};

// A face of the coordinate box that is part of the manifold boundary.
struct Face {
  int axis = 0;
  bool upper = false;  // x[axis] == hi[axis] when true, lo otherwise
};

template <int N>
using JetMatrix = std::array<std::array<Jet<N>, 4>, 4>;

// A Riemannian metric on a coordinate box, given by symmetric component
// expressions and an optional log-conformal factor w (the metric is
// e^{2w} g_ab).
class MetricField {
 public:
  using Components = std::array<std::array<Expr, 4>, 4>;

  MetricField() = default;
  // Only the upper triangle of `g` is read.
  MetricField(const Components& g, Box domain, std::optional<Expr> w = std::nullopt);

  const Expr& component(int a, int b) const { return a <= b ? g_[a][b] : g_[b][a]; }
  const Box& domain() const { return box_; }
  const std::optional<Expr>& log_conformal() const { return w_; }

  // e^{2w} times this metric; composes with an existing factor.
  MetricField rescaled(const Expr& w) const;
  // The same components on a different box.
  MetricField with_domain(Box domain) const;
  // Components with the conformal factor multiplied in.
  Components effective_components() const;

  // True if some component or the conformal factor depends on x<slot>.
  bool depends_on(int slot) const { return (prog_->var_mask() >> slot) & 1; }

  // Jets of the (rescaled) components at x to the given order, with every
  // coordinate active in its own jet slot.
  template <int N>
  JetMatrix<N> jets(const Point& x, int order) const;
  // Same, with caller-supplied coordinate jets.
  template <int N>
  JetMatrix<N> jets(const std::array<Jet<N>, 4>& vars) const;

  Eigen::Matrix4d value(const Point& x) const;

 private:
  void compile();

  Components g_;
  Box box_;
  std::optional<Expr> w_;
  std::shared_ptr<const Program> prog_;
  std::array<int, 10> out_{};
  int w_out_ = -1;
};

// Checked metric jets: throws NonPositiveDefinite if the value matrix is not
// positive definite.
template <int N>
JetMatrix<N> metric_jet(const MetricField& field, const Point& x, int order);

void check_positive_definite(const Eigen::Matrix4d& g, const Point& x);

template <int N>
JetMatrix<N> MetricField::jets(const std::array<Jet<N>, 4>& vars) const {
  thread_local std::vector<Jet<N>> regs;
  prog_->run(vars, regs);
  JetMatrix<N> g;
  int k = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      g[a][b] = prog_->output(regs, out_[k++]);
    }
  }
  if (w_out_ >= 0) {
    Jet<N> f = exp(2.0 * prog_->output(regs, w_out_));
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) g[a][b] = g[a][b] * f;
    }
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < a; ++b) g[a][b] = g[b][a];
  }
  return g;
}

template <int N>
JetMatrix<N> MetricField::jets(const Point& x, int order) const {
  std::array<Jet<N>, 4> vars;
  for (int k = 0; k < 4; ++k) vars[k] = Jet<N>::variable(k, x[k], order);
  return jets<N>(vars);
}

template <int N>
JetMatrix<N> metric_jet(const MetricField& field, const Point& x, int order) {
  JetMatrix<N> g = field.jets<N>(x, order);
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) m(a, b) = g[a][b].value();
  }
  check_positive_definite(m, x);
  return g;
}

}  // namespace confbound
