#include "confbound/metric.hpp"

#include <cstdio>

namespace confbound {

MetricField::MetricField(const Components& g, Box domain, std::optional<Expr> w)
    : box_(domain), w_(std::move(w)) {
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) g_[a][b] = a <= b ? g[a][b] : g[b][a];
  }
  compile();
}

void MetricField::compile() {
  auto prog = std::make_shared<Program>();
  int k = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) out_[k++] = prog->add(g_[a][b]);
  }
  w_out_ = w_ ? prog->add(*w_) : -1;
  prog_ = prog;
}

MetricField MetricField::rescaled(const Expr& w) const {
  MetricField out = *this;
  out.w_ = w_ ? *w_ + w : w;
  out.compile();
  return out;
}

MetricField MetricField::with_domain(Box domain) const {
  MetricField out = *this;
  out.box_ = domain;
  return out;
}

MetricField::Components MetricField::effective_components() const {
  Components c = g_;
  if (w_) {
    Expr f = exp(Expr(2.0) * *w_);
    for (auto& row : c) {
      for (auto& e : row) e = e.is_zero() ? e : f * e;
    }
  }
  return c;
}

Eigen::Matrix4d MetricField::value(const Point& x) const {
  thread_local std::vector<double> regs;
  prog_->run(x, regs);
  Eigen::Matrix4d m;
  int k = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      m(a, b) = m(b, a) = prog_->output(regs, out_[k++]);
    }
  }
  if (w_out_ >= 0) m *= std::exp(2.0 * prog_->output(regs, w_out_));
  return m;
}

void check_positive_definite(const Eigen::Matrix4d& g, const Point& x) {
  Eigen::LLT<Eigen::Matrix4d> llt(g);
  if (llt.info() == Eigen::Success && g.allFinite()) return;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(g, Eigen::EigenvaluesOnly);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "metric not positive definite at (%.17g, %.17g, %.17g, %.17g): smallest eigenvalue %.6g",
                x[0], x[1], x[2], x[3], es.eigenvalues()(0));
  throw NonPositiveDefinite(buf);
}

}  // namespace confbound
