#include "confbound/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "confbound/errors.hpp"

namespace confbound {

MetricField rescale(const MetricField& field, const Expr& w) { return field.rescaled(w); }

Model rescale(const Model& model, const Expr& w) {
  Model out = model;
  out.field = model.field.rescaled(w);
  out.isEinstein = false;
  return out;
}

Expr random_conformal_factor(const Model& model, unsigned seed, double amplitude, bool axisymmetric) {
  const std::vector<Expr>& f = axisymmetric ? model.invariantFunctions : model.embedding;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Expr w(0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    w = w + Expr(amplitude * u(rng)) * f[i];
    for (std::size_t j = i; j < f.size(); ++j) w = w + Expr(0.5 * amplitude * u(rng)) * f[i] * f[j];
  }
  return w;
}

namespace {

double eval_at(const Expr& e, const Point& x) { return e.eval(x); }

// Value, gradient and Laplacian of a scalar expression at x.
struct ScalarJet {
  double value = 0.0;
  std::array<double, 4> grad{};
  double laplacian = 0.0;
  double gradNormSq = 0.0;
};

ScalarJet scalar_jet(const Expr& f, const Curvature<2>& c, const Point& x) {
  std::array<Jet<2>, 4> vars;
  for (int k = 0; k < 4; ++k) vars[k] = Jet<2>::variable(k, x[k], 2);
  Jet<2> j = f.eval(vars);
  ScalarJet s;
  s.value = j.value();
  for (int a = 0; a < 4; ++a) s.grad[a] = j.d(a);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      double hess = j.derivative(a).d(b);
      for (int k = 0; k < 4; ++k) hess -= c.gamma(k, a, b).value() * s.grad[k];
      s.laplacian += c.ginv(a, b).value() * hess;
      s.gradNormSq += c.ginv(a, b).value() * s.grad[a] * s.grad[b];
    }
  }
  return s;
}

}  // namespace

PointwiseLaws pointwise_laws(const Model& model, const Expr& w, int bulk_per_axis, int boundary_per_axis) {
  PointwiseLaws out;
  MetricField gw = model.field.rescaled(w);
  auto pts = bulk_samples(model.field.domain(), bulk_per_axis);
  std::vector<PointwiseLaws> per(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Point& x = pts[i];
    const double ew = std::exp(eval_at(w, x));
    Mat4 b0 = bach(model.field, x), b1 = bach(gw, x);
    per[i].bach = (b1 - b0 / (ew * ew)).cwiseAbs().maxCoeff();
    Curvature<2> c0(metric_jet<2>(model.field, x, 2));
    Curvature<2> c1(metric_jet<2>(gw, x, 2));
    ScalarJet s = scalar_jet(w, c0, x);
    double predicted = (c0.scalar().value() - 6.0 * s.laplacian - 6.0 * s.gradNormSq) / (ew * ew);
    per[i].scalar = std::abs(c1.scalar().value() - predicted);
  });
  for (const auto& p : per) {
    out.bach = std::max(out.bach, p.bach);
    out.scalar = std::max(out.scalar, p.scalar);
  }
  for (const Face& f : model.boundary) {
    auto fp = face_samples(model.field, f, boundary_per_axis);
    std::vector<double> res(fp.size());
    parallel_for(fp.size(), [&](std::size_t i) {
      const Point& x = fp[i];
      BoundaryGeometry a = boundary_geometry(model.field, f, x, true);
      BoundaryGeometry b = boundary_geometry(gw, f, x, true);
      res[i] = (b.S - a.S * std::exp(-eval_at(w, x))).cwiseAbs().maxCoeff();
    });
    for (double r : res) out.sTensor = std::max(out.sTensor, r);
  }
  return out;
}

InvarianceResiduals invariance_residuals(const Model& model, const Expr& w, const QuadratureRule& rule,
                                         bool with_pointwise) {
  return invariance_residuals(model, w, invariants_report(model, rule), rule, with_pointwise);
}

InvarianceResiduals invariance_residuals(const Model& model, const Expr& w, const InvariantReport& before,
                                         const QuadratureRule& rule, bool with_pointwise) {
  InvarianceResiduals r;
  r.before = before;
  Model m = rescale(model, w);
  r.after = invariants_report(m, rule);
  r.Wb = std::abs(r.after.Wb - r.before.Wb);
  r.Einv = std::abs(r.after.Einv - r.before.Einv);
  if (r.before.betaB && r.after.betaB) r.betaB = std::abs(*r.after.betaB - *r.before.betaB);
  if (with_pointwise) r.pointwise = pointwise_laws(model, w);
  return r;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const OptimizerConfig& cfg) {
  const std::size_t n = x0.size();
  SimplexResult res;
  res.x = x0;
  res.value = f(x0);
  if (n == 0) {
    res.converged = true;
    return res;
  }
  auto build = [&](const std::vector<double>& base, double base_value, std::vector<std::vector<double>>& pts,
                   std::vector<double>& vals) {
    pts.assign(n + 1, base);
    vals.assign(n + 1, base_value);
    for (std::size_t k = 0; k < n; ++k) {
      pts[k + 1][k] += cfg.scale;
      vals[k + 1] = f(pts[k + 1]);
    }
  };
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  build(x0, res.value, pts, vals);
  int it = 0;
  double restart_value = res.value;
  while (it < cfg.maxIter) {
    std::vector<std::size_t> order(n + 1);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    const double spread = vals[worst] - vals[best];
    if (spread <= cfg.tol * std::max(1.0, std::abs(vals[best]))) {
      // Restart around the best vertex; stop once a restart no longer
      // improves the value.
      if (restart_value - vals[best] <= cfg.tol * std::max(1.0, std::abs(vals[best]))) {
        res.converged = true;
        break;
      }
      restart_value = vals[best];
      std::vector<double> b = pts[best];
      double bv = vals[best];
      build(b, bv, pts, vals);
      ++it;
      continue;
    }
    ++it;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[k][d] / n;
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      return p;
    };
    std::vector<double> xr = along(-1.0);
    double fr = f(xr);
    if (fr < vals[best]) {
      std::vector<double> xe = along(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      std::vector<double> xc = along(outside ? -0.5 : 0.5);
      double fc = f(xc);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (std::size_t d = 0; d < n; ++d) pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
          vals[k] = f(pts[k]);
        }
      }
    }
  }
  std::size_t best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  if (vals[best] < res.value) {
    res.value = vals[best];
    res.x = pts[best];
  }
  res.iterations = it;
  return res;
}

namespace {

// Precomputed node data for F_b(e^{2w} g) with w in the span of a basis.
class YamabeFunctional {
 public:
  YamabeFunctional(const Model& model, const std::vector<Expr>& basis, const QuadratureRule& rule)
      : k_(basis.size()) {
    const MetricField& field = model.field;
    std::array<bool, 4> active{};
    for (int a = 0; a < 4; ++a) {
      active[a] = field.depends_on(a);
      for (const Expr& b : basis) active[a] = active[a] || b.depends_on(a);
    }
    const Box& box = field.domain();
    const GaussRule& g = gauss_legendre(rule.orderPerAxis);
    auto nodes = [&](int a) {
      std::vector<std::pair<double, double>> out;
      if (!active[a]) {
        out.push_back({0.5 * (box.lo[a] + box.hi[a]), box.hi[a] - box.lo[a]});
        return out;
      }
      const double half = 0.5 * (box.hi[a] - box.lo[a]), mid = 0.5 * (box.lo[a] + box.hi[a]);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) out.push_back({mid + half * g.nodes[i], half * g.weights[i]});
      return out;
    };
    std::array<std::vector<std::pair<double, double>>, 4> ax;
    for (int a = 0; a < 4; ++a) ax[a] = nodes(a);

    std::vector<Point> pts;
    std::vector<double> wts;
    for (auto& n0 : ax[0])
      for (auto& n1 : ax[1])
        for (auto& n2 : ax[2])
          for (auto& n3 : ax[3]) {
            pts.push_back({n0.first, n1.first, n2.first, n3.first});
            wts.push_back(n0.second * n1.second * n2.second * n3.second);
          }
    bulk_.resize(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      Curvature<2> c(metric_jet<2>(field, pts[i], 2));
      BulkNode& b = bulk_[i];
      Mat4 gm;
      for (int a = 0; a < 4; ++a)
        for (int d = 0; d < 4; ++d) {
          gm(a, d) = c.g(a, d).value();
          b.ginv[a * 4 + d] = c.ginv(a, d).value();
        }
      b.weight = wts[i] * std::sqrt(gm.determinant());
      b.R = c.scalar().value();
      for (const Expr& f : basis) {
        ScalarJet s = scalar_jet(f, c, pts[i]);
        b.phi.push_back(s.value);
        b.lap.push_back(s.laplacian);
        for (int a = 0; a < 4; ++a) b.grad.push_back(s.grad[a]);
      }
    });

    for (const Face& face : model.boundary) {
      auto t = tangent_axes(face.axis);
      std::vector<Point> fp;
      std::vector<double> fw;
      for (auto& n0 : ax[t[0]])
        for (auto& n1 : ax[t[1]])
          for (auto& n2 : ax[t[2]]) {
            Point x{};
            x[t[0]] = n0.first;
            x[t[1]] = n1.first;
            x[t[2]] = n2.first;
            x[face.axis] = face.upper ? box.hi[face.axis] : box.lo[face.axis];
            fp.push_back(x);
            fw.push_back(n0.second * n1.second * n2.second);
          }
      std::vector<FaceNode> nodes(fp.size());
      parallel_for(fp.size(), [&](std::size_t i) {
        Curvature<2> c(metric_jet<2>(field, fp[i], 2));
        BoundaryGeometry geo = boundary_from(c, face);
        FaceNode& n = nodes[i];
        n.weight = fw[i] * geo.areaDensity;
        n.H = geo.H;
        const double s = face.upper ? 1.0 : -1.0;
        const double gaa = c.ginv(face.axis, face.axis).value();
        std::array<double, 4> nu{};
        for (int a = 0; a < 4; ++a) nu[a] = s * c.ginv(a, face.axis).value() / std::sqrt(gaa);
        for (const Expr& f : basis) {
          std::array<Jet<2>, 4> vars;
          for (int k = 0; k < 4; ++k) vars[k] = Jet<2>::variable(k, fp[i][k], 1);
          Jet<2> j = f.eval(vars);
          n.phi.push_back(j.value());
          double dn = 0.0;
          for (int a = 0; a < 4; ++a) dn += nu[a] * j.d(a);
          n.dnu.push_back(dn);
        }
      });
      faces_.insert(faces_.end(), nodes.begin(), nodes.end());
    }
  }

  double operator()(const std::vector<double>& c) const {
    double bulk = 0.0, vol = 0.0;
    for (const BulkNode& b : bulk_) {
      double w = 0.0, lap = 0.0;
      std::array<double, 4> dw{};
      for (std::size_t k = 0; k < k_; ++k) {
        w += c[k] * b.phi[k];
        lap += c[k] * b.lap[k];
        for (int a = 0; a < 4; ++a) dw[a] += c[k] * b.grad[4 * k + a];
      }
      double grad2 = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int d = 0; d < 4; ++d) grad2 += b.ginv[a * 4 + d] * dw[a] * dw[d];
      const double e2 = std::exp(2.0 * w);
      bulk += b.weight * e2 * (b.R - 6.0 * lap - 6.0 * grad2);
      vol += b.weight * e2 * e2;
    }
    double bdy = 0.0;
    for (const FaceNode& n : faces_) {
      double w = 0.0, dn = 0.0;
      for (std::size_t k = 0; k < k_; ++k) {
        w += c[k] * n.phi[k];
        dn += c[k] * n.dnu[k];
      }
      bdy += n.weight * std::exp(2.0 * w) * (n.H + 3.0 * dn);
    }
    return (bulk + 2.0 * bdy) / std::sqrt(vol);
  }

 private:
  struct BulkNode {
    double weight = 0.0, R = 0.0;
    std::array<double, 16> ginv{};
    std::vector<double> phi, lap, grad;
  };
  struct FaceNode {
    double weight = 0.0, H = 0.0;
    std::vector<double> phi, dnu;
  };
  std::size_t k_;
  std::vector<BulkNode> bulk_;
  std::vector<FaceNode> faces_;
};

}  // namespace

YamabeEstimate yamabe_estimate(const Model& model, const std::vector<Expr>& basis, const OptimizerConfig& cfg,
                               const QuadratureRule& rule) {
  if (basis.size() > 32) throw std::invalid_argument("Yamabe basis is limited to 32 functions");
  YamabeEstimate est;
  for (const Expr& b : basis) est.basis.push_back(b.to_string());
  est.start = invariants_report(model, rule).Fb;
  if (basis.empty()) {
    est.value = est.start;
    est.converged = true;
    return est;
  }
  YamabeFunctional F(model, basis, rule);
  SimplexResult r = nelder_mead([&](const std::vector<double>& c) { return F(c); },
                                std::vector<double>(basis.size(), 0.0), cfg);
  est.coefficients = r.x;
  est.value = std::min(r.value, est.start);
  est.iterations = r.iterations;
  est.converged = r.converged;
  return est;
}

std::vector<Expr> default_yamabe_basis(const Model& model, int size) {
  // ((hi - x0) / (hi - lo))^{2k}: smooth at a pole sitting at x0 = hi.
  const Box& box = model.field.domain();
  Expr t = (Expr(box.hi[0]) - Expr::var(0)) / Expr(box.hi[0] - box.lo[0]);
  std::vector<Expr> out;
  for (int k = 1; k <= size; ++k) out.push_back(pow(t, Expr(2.0 * k)));
  return out;
}

}  // namespace confbound
