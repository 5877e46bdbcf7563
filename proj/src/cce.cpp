#include "confbound/cce.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "confbound/errors.hpp"

namespace confbound {

using std::numbers::pi;

namespace {

using Vec4 = Eigen::Vector4d;

double face_coord(const Box& b, const Face& f) { return f.upper ? b.hi[f.axis] : b.lo[f.axis]; }
double inward(const Face& f) { return f.upper ? -1.0 : 1.0; }

const ConformallyCompactData& cc_of(const Model& m) {
  if (!m.cc) throw NotConformallyCompact(m.name + ": model carries no conformally compact data");
  return *m.cc;
}

Point shifted(Point x, int axis, double d) {
  x[axis] += d;
  return x;
}

Vec4 gradient(const Expr& e, const Point& x, double* value = nullptr) {
  std::array<Jet<1>, 4> vars;
  for (int k = 0; k < 4; ++k) vars[k] = Jet<1>::variable(k, x[k], 1);
  Jet<1> j = e.eval(vars);
  if (value) *value = j.value();
  return Vec4(j.d(0), j.d(1), j.d(2), j.d(3));
}

template <int N>
Jet<N> det4(const JetMatrix<N>& m) {
  Jet<N> s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
  Jet<N> s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
  Jet<N> s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
  Jet<N> s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
  Jet<N> s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
  Jet<N> s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
  Jet<N> c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
  Jet<N> c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
  Jet<N> c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
  Jet<N> c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
  Jet<N> c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
  Jet<N> c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

// The model's field as a geodesic collar dr^2 + h_r along its first face.
struct Collar {
  const MetricField* field;
  Face face;
  double xf = 0.0;
  double length = 0.0;
};

Collar collar_of(const Model& m) {
  cc_of(m);
  if (m.boundary.empty()) throw NotConformallyCompact(m.name + ": no face at infinity");
  Collar c{&m.field, m.boundary[0], 0.0, 0.0};
  const Box& b = m.field.domain();
  const int a = c.face.axis;
  c.xf = face_coord(b, c.face);
  c.length = b.hi[a] - b.lo[a];
  for (const Point& x : bulk_samples(b, 3)) {
    Mat4 g = m.field.value(x);
    bool ok = std::abs(g(a, a) - 1.0) <= 1e-10;
    for (int k = 0; k < 4; ++k) ok = ok && (k == a || std::abs(g(a, k)) <= 1e-10);
    if (!ok) {
      throw NotConformallyCompact(m.name + ": field is not a geodesic collar dr^2 + h_r along its face");
    }
  }
  return c;
}

std::vector<std::pair<Point, double>> face_nodes(const MetricField& field, const Face& face, int order) {
  const Box& b = field.domain();
  auto t = tangent_axes(face.axis);
  std::array<std::vector<std::pair<double, double>>, 3> ax;
  const GaussRule& g = gauss_legendre(order);
  for (int i = 0; i < 3; ++i) {
    const double lo = b.lo[t[i]], hi = b.hi[t[i]];
    if (!field.depends_on(t[i])) {
      ax[i] = {{0.5 * (lo + hi), hi - lo}};
      continue;
    }
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      ax[i].push_back({0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[k], 0.5 * (hi - lo) * g.weights[k]});
    }
  }
  std::vector<std::pair<Point, double>> out;
  for (auto& n0 : ax[0])
    for (auto& n1 : ax[1])
      for (auto& n2 : ax[2]) {
        Point x{};
        x[t[0]] = n0.first;
        x[t[1]] = n1.first;
        x[t[2]] = n2.first;
        x[face.axis] = face_coord(b, face);
        out.push_back({x, n0.second * n1.second * n2.second});
      }
  return out;
}

// Characteristics of |d rho + rho dv|^2_gbar = 1 for r = rho e^v, in the
// parameter tau = log r. The covector q = d rho + rho dv stays unit.
class Characteristics {
 public:
  Characteristics(const MetricField& gbar, const Expr& rho, const Face& face)
      : gbar_(gbar), rho_(rho), face_(face) {}

  struct State {
    Vec4 x, q;
  };

  struct Local {
    Mat4 G, Ginv;
    std::array<Mat4, 4> dGinv;
    double rho = 0.0;
    Vec4 drho;
  };

  Local local(const Vec4& x) const {
    Point p{x(0), x(1), x(2), x(3)};
    auto gj = gbar_.jets<1>(p, 1);
    Local l;
    std::array<Mat4, 4> dG;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        l.G(a, b) = gj[a][b].value();
        for (int c = 0; c < 4; ++c) dG[c](a, b) = gj[a][b].d(c);
      }
    }
    l.Ginv = l.G.inverse();
    for (int c = 0; c < 4; ++c) l.dGinv[c] = -l.Ginv * dG[c] * l.Ginv;
    l.drho = gradient(rho_, p, &l.rho);
    return l;
  }

  State rhs(const State& s, double* constraint = nullptr) const {
    Local l = local(s.x);
    Vec4 Q = l.Ginv * s.q;
    const double qq = s.q.dot(Q);
    const double rq = l.drho.dot(Q);
    State d;
    d.x = l.rho * Q;
    for (int c = 0; c < 4; ++c) {
      d.q(c) = -l.drho(c) * qq + rq * s.q(c) - 0.5 * l.rho * s.q.dot(l.dGinv[c] * s.q);
    }
    if (constraint) *constraint = std::abs(qq - 1.0);
    return d;
  }

  // Point on the coordinate line through the face point p where rho = target.
  Vec4 axis_point(const Point& p, double target) const {
    const int a = face_.axis;
    Point x = p;
    Vec4 g = gradient(rho_, p);
    double d = target / std::abs(g(a));
    for (int it = 0; it < 30; ++it) {
      x = shifted(p, a, inward(face_) * d);
      double v;
      g = gradient(rho_, x, &v);
      const double step = (v - target) / (inward(face_) * g(a));
      d -= step;
      if (std::abs(step) <= 1e-15 * std::abs(d)) break;
    }
    x = shifted(p, a, inward(face_) * d);
    return Vec4(x[0], x[1], x[2], x[3]);
  }

 private:
  const MetricField& gbar_;
  const Expr& rho_;
  Face face_;
};

struct BoundaryFactor {
  double omega = 0.0;
  Vec4 domega = Vec4::Zero();
};

BoundaryFactor boundary_factor(const ConformallyCompactData& cc, const Expr& omega, const Point& p) {
  BoundaryFactor b;
  const int a = cc.face.axis;
  std::array<Jet<2>, 4> vars;
  for (int k = 0; k < 4; ++k) vars[k] = Jet<2>::variable(k, p[k], 2);
  if (cc.geodesicR) {
    Jet<2> R = cc.geodesicR->eval(vars);
    Jet<2> P = cc.rho.eval(vars);
    const double ra = R.d(a), pa = P.d(a);
    if (!(ra / pa > 0.0)) throw NotConformallyCompact("defining functions have opposite orientation at the face");
    b.omega = std::log(ra / pa);
    Jet<2> Ra = R.derivative(a), Pa = P.derivative(a);
    for (int t : tangent_axes(a)) b.domega(t) = Ra.d(t) / ra - Pa.d(t) / pa;
  }
  std::array<Jet<1>, 4> v1;
  for (int k = 0; k < 4; ++k) v1[k] = Jet<1>::variable(k, p[k], 1);
  Jet<1> w = omega.eval(v1);
  b.omega += w.value();
  for (int t : tangent_axes(a)) b.domega(t) += w.d(t);
  return b;
}

struct RunResult {
  std::vector<Point> x;
  double constraint = 0.0;
};

RunResult run_trajectory(const ConformallyCompactData& cc, const Characteristics& ch, const Expr& omega,
                         const Point& p, const GeodesicOptions& opt) {
  const int K = opt.startHalvings, m = opt.stepsPerHalving;
  const double rt = opt.depth * std::ldexp(1.0, -K);
  BoundaryFactor bf = boundary_factor(cc, omega, p);

  // Start point from v = omega + v1 rho + O(rho^2).
  double rho0 = rt * std::exp(-bf.omega);
  Vec4 x = ch.axis_point(p, rho0);
  auto l = ch.local(x);
  const double a_coef = (l.drho.dot(l.Ginv * l.drho) - 1.0) / l.rho;
  const double v1 = -0.5 * a_coef - l.drho.dot(l.Ginv * bf.domega);
  for (int it = 0; it < 3; ++it) rho0 = rt * std::exp(-(bf.omega + v1 * rho0));
  x = ch.axis_point(p, rho0);
  l = ch.local(x);
  Vec4 Q = l.Ginv * l.drho;
  Vec4 pf(p[0], p[1], p[2], p[3]);
  Vec4 x0 = pf + rho0 / l.drho.dot(Q) * Q;
  for (int it = 0; it < 3; ++it) {
    auto l0 = ch.local(x0);
    x0 += (rho0 - l0.rho) / l0.drho.dot(Q) * Q;
  }
  l = ch.local(x0);
  Vec4 q = l.drho + l.rho * (bf.domega + v1 * l.drho);
  q /= std::sqrt(q.dot(l.Ginv * q));

  const Box& box = cc.chart;
  const double h = std::log(2.0) / m;
  const int total = K * m;
  RunResult out;
  out.x.resize(7);
  Characteristics::State s{x0, q};
  for (int step = 0; step <= total; ++step) {
    const int from_end = total - step;
    if (from_end % m == 0 && from_end / m <= 6) {
      out.x[from_end / m] = Point{s.x(0), s.x(1), s.x(2), s.x(3)};
    }
    if (step == total) break;
    double c;
    auto k1 = ch.rhs(s, &c);
    out.constraint = std::max(out.constraint, c);
    Characteristics::State t;
    t.x = s.x + 0.5 * h * k1.x;
    t.q = s.q + 0.5 * h * k1.q;
    auto k2 = ch.rhs(t);
    t.x = s.x + 0.5 * h * k2.x;
    t.q = s.q + 0.5 * h * k2.q;
    auto k3 = ch.rhs(t);
    t.x = s.x + h * k3.x;
    t.q = s.q + h * k3.q;
    auto k4 = ch.rhs(t);
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    Point px{s.x(0), s.x(1), s.x(2), s.x(3)};
    if (!s.x.allFinite() || !s.q.allFinite() || !box.contains(px, 1e-9)) {
      throw OdeDivergence("trajectory left the chart at r = " + std::to_string(rt * std::exp(h * (step + 1))));
    }
  }
  double c;
  ch.rhs(s, &c);
  out.constraint = std::max(out.constraint, c);
  return out;
}

Mat3 tangential_block(const Mat4& g, const std::array<int, 3>& t) {
  Mat3 h;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h(i, j) = g(t[i], t[j]);
  return h;
}

}  // namespace

MetricField compactified_metric(const ConformallyCompactData& cc) {
  MetricField::Components c;
  Expr r2 = pow(cc.rho, Expr(2.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) c[i][j] = cc.gPlus[i][j].is_zero() ? Expr(0.0) : r2 * cc.gPlus[i][j];
  }
  return MetricField(c, cc.chart);
}

void validate_conformally_compact(const Model& model) {
  const ConformallyCompactData& cc = cc_of(model);
  MetricField gbar = compactified_metric(cc);
  const Face& f = cc.face;
  for (const Point& p : face_samples(gbar, f, 3)) {
    Mat4 g1, g2;
    Vec4 d;
    double rho0;
    try {
      rho0 = cc.rho.eval(p);
      g1 = gbar.value(shifted(p, f.axis, inward(f) * 1e-6));
      Point x2 = shifted(p, f.axis, inward(f) * 1e-7);
      g2 = gbar.value(x2);
      d = gradient(cc.rho, x2);
    } catch (const Error& e) {
      throw NotConformallyCompact(model.name + ": rho^2 g+ cannot be evaluated near the face: " + e.what());
    }
    if (std::abs(rho0) > 1e-10) throw NotConformallyCompact(model.name + ": rho does not vanish on the face");
    const double scale = g2.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !((g1 - g2).cwiseAbs().maxCoeff() <= 1e-3 * scale)) {
      throw NotConformallyCompact(model.name + ": rho^2 g+ does not extend continuously to the face");
    }
    Eigen::SelfAdjointEigenSolver<Mat4> es(g2);
    if (!(es.eigenvalues()(0) > 1e-8 * scale)) {
      throw NotConformallyCompact(model.name + ": rho^2 g+ degenerates at the face");
    }
    const double n2 = d.dot(g2.inverse() * d);
    if (!(std::abs(n2 - 1.0) < 1e-3)) {
      throw NotConformallyCompact(model.name + ": |d rho| in rho^2 g+ does not tend to 1 at the face (" +
                                  std::to_string(std::sqrt(n2)) + ")");
    }
  }
  for (const Point& x : bulk_samples(cc.chart, 3)) {
    if (!(cc.rho.eval(x) > 0.0)) throw NotConformallyCompact(model.name + ": rho is not positive inside the chart");
  }
}

double einstein_residual(const Model& model, int per_axis) {
  const ConformallyCompactData& cc = cc_of(model);
  MetricField gp(cc.gPlus, cc.chart);
  auto pts = bulk_samples(cc.chart, per_axis);
  std::vector<double> res(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    Curvature<2> c(metric_jet<2>(gp, pts[i], 2));
    double m = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) m = std::max(m, std::abs(c.ric(a, b).value() + 3.0 * c.g(a, b).value()));
    res[i] = m;
  });
  return *std::max_element(res.begin(), res.end());
}

DefiningFunctionCheck defining_function_check(const Model& model, const Expr& r, double depth, int per_axis) {
  const ConformallyCompactData& cc = cc_of(model);
  MetricField gp(cc.gPlus, cc.chart);
  DefiningFunctionCheck out;
  for (const Point& p : face_samples(gp, cc.face, per_axis)) {
    for (int k = 1; k <= per_axis; ++k) {
      Point x = shifted(p, cc.face.axis, inward(cc.face) * depth * k / per_axis);
      double rv;
      Vec4 d = gradient(r, x, &rv);
      const double n2 = d.dot(gp.value(x).inverse() * d) / (rv * rv);
      out.residual = std::max(out.residual, std::abs(n2 - 1.0));
    }
  }
  out.geodesic = out.residual < 1e-6;
  return out;
}

GeodesicReport geodesic_defining_function(const Model& model, const Expr& omega, const GeodesicOptions& opt) {
  validate_conformally_compact(model);
  const ConformallyCompactData& cc = *model.cc;
  if (opt.startHalvings < 7 || opt.stepsPerHalving < 1 || !(opt.depth > 0.0)) {
    throw std::invalid_argument("geodesic options: need startHalvings >= 7, stepsPerHalving >= 1, depth > 0");
  }
  MetricField gbar = compactified_metric(cc);
  Characteristics ch(gbar, cc.rho, cc.face);
  const auto t = tangent_axes(cc.face.axis);
  const bool compare = cc.geodesicR.has_value() && omega.is_zero();

  std::vector<Point> starts = face_samples(gbar, cc.face, opt.samplesPerAxis);
  // Centre plus the four stencil points per tangential direction.
  const std::array<double, 4> offsets{-2.0, -1.0, 1.0, 2.0};
  const std::size_t per = opt.withMetric ? 13 : 1;
  std::vector<Point> seeds;
  for (const Point& p : starts) {
    seeds.push_back(p);
    if (!opt.withMetric) continue;
    for (int i = 0; i < 3; ++i)
      for (double o : offsets) seeds.push_back(shifted(p, t[i], o * opt.stencil));
  }
  std::vector<RunResult> runs(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    runs[i] = run_trajectory(cc, ch, omega, seeds[i], opt);
    if (!opt.richardson) return;
    GeodesicOptions fine = opt;
    fine.stepsPerHalving *= 2;
    RunResult f = run_trajectory(cc, ch, omega, seeds[i], fine);
    for (std::size_t k = 0; k < f.x.size(); ++k) {
      for (int c = 0; c < 4; ++c) f.x[k][c] += (f.x[k][c] - runs[i].x[k][c]) / 15.0;
    }
    f.constraint = std::max(f.constraint, runs[i].constraint);
    runs[i] = std::move(f);
  });

  GeodesicReport rep;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    GeodesicTrajectory tr;
    for (int i = 0; i < 3; ++i) tr.y[i] = starts[s][t[i]];
    const RunResult& c = runs[s * per];
    tr.x = c.x;
    tr.constraint = c.constraint;
    for (int k = 0; k <= 6; ++k) tr.r.push_back(opt.depth * std::ldexp(1.0, -k));
    if (compare) {
      double worst = 0.0;
      for (int k = 0; k <= 6; ++k) worst = std::max(worst, std::abs(cc.geodesicR->eval(tr.x[k]) - tr.r[k]));
      tr.analyticResidual = worst;
      rep.analyticResidual = std::max(rep.analyticResidual.value_or(0.0), worst);
    }
    for (std::size_t j = 1; j < per; ++j) tr.constraint = std::max(tr.constraint, runs[s * per + j].constraint);
    if (opt.withMetric) {
      for (int k = 0; k <= 6; ++k) {
        Eigen::Matrix<double, 4, 3> J;
        for (int i = 0; i < 3; ++i) {
          auto at = [&](int o) {
            const Point& x = runs[s * per + 1 + 4 * i + o].x[k];
            return Vec4(x[0], x[1], x[2], x[3]);
          };
          J.col(i) = (at(0) - 8.0 * at(1) + 8.0 * at(2) - at(3)) / (12.0 * opt.stencil);
        }
        const double ratio = tr.r[k] / cc.rho.eval(tr.x[k]);
        tr.h.push_back(ratio * ratio * J.transpose() * gbar.value(tr.x[k]) * J);
      }
    }
    rep.constraint = std::max(rep.constraint, tr.constraint);
    rep.trajectories.push_back(std::move(tr));
  }
  return rep;
}

FGSample fit_fg(const std::array<double, 3>& y, const std::vector<double>& r, const std::vector<Mat3>& h) {
  const int n = static_cast<int>(r.size());
  if (n < 5 || h.size() != r.size()) throw FitIllConditioned("FG fit needs at least 5 samples");
  const double r0 = *std::max_element(r.begin(), r.end());
  Eigen::MatrixXd A(n, 5);
  for (int k = 0; k < n; ++k) {
    double p = 1.0;
    for (int j = 0; j < 5; ++j, p *= r[k] / r0) A(k, j) = p;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 5) throw FitIllConditioned("FG fit samples are degenerate");
  FGSample s;
  s.y = y;
  std::array<Mat3*, 5> out{&s.h, &s.g1, &s.g2, &s.g3, &s.g4};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      Eigen::VectorXd b(n);
      for (int k = 0; k < n; ++k) b(k) = h[k](i, j);
      Eigen::VectorXd c = qr.solve(b);
      s.fitResidual = std::max(s.fitResidual, (A * c - b).cwiseAbs().maxCoeff());
      for (int d = 0; d < 5; ++d) {
        const double v = c(d) / std::pow(r0, d);
        (*out[d])(i, j) = v;
        (*out[d])(j, i) = v;
      }
    }
  }
  return s;
}

namespace {

FGExpansion summarize(std::vector<FGSample> samples) {
  FGExpansion fg;
  fg.samples = std::move(samples);
  for (const FGSample& s : fg.samples) {
    fg.maxG1 = std::max(fg.maxG1, s.g1.cwiseAbs().maxCoeff());
    fg.maxG3 = std::max(fg.maxG3, s.g3.cwiseAbs().maxCoeff());
    fg.fitResidual = std::max(fg.fitResidual, s.fitResidual);
  }
  return fg;
}

}  // namespace

FGExpansion fg_coefficients(const Model& model, int samples_per_axis) {
  Collar c = collar_of(model);
  const double depth = model.cc->fgDepth;
  const auto t = tangent_axes(c.face.axis);
  std::vector<FGSample> out;
  for (const Point& p : face_samples(*c.field, c.face, samples_per_axis)) {
    std::vector<double> r;
    std::vector<Mat3> h;
    for (int k = 0; k <= 6; ++k) {
      r.push_back(depth * std::ldexp(1.0, -k));
      h.push_back(tangential_block(c.field->value(shifted(p, c.face.axis, inward(c.face) * r.back())), t));
    }
    out.push_back(fit_fg({p[t[0]], p[t[1]], p[t[2]]}, r, h));
  }
  return summarize(std::move(out));
}

FGExpansion fg_coefficients(const GeodesicReport& report) {
  std::vector<FGSample> out;
  for (const GeodesicTrajectory& tr : report.trajectories) {
    if (tr.h.empty()) throw std::invalid_argument("trajectories were integrated without the metric");
    out.push_back(fit_fg(tr.y, tr.r, tr.h));
  }
  return summarize(std::move(out));
}

double fg_schouten_residual(const Model& model, const FGExpansion& fg) {
  Collar c = collar_of(model);
  const auto t = tangent_axes(c.face.axis);
  double worst = 0.0;
  for (const FGSample& s : fg.samples) {
    Point p{};
    for (int i = 0; i < 3; ++i) p[t[i]] = s.y[i];
    p[c.face.axis] = c.xf;
    auto gj = metric_jet<2>(*c.field, p, 2);
    JetMatrix<2> hj;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) hj[i][j] = gj[t[i]][t[j]];
    Curvature<2> ch(hj, 3, {t[0], t[1], t[2], 0});
    const double R = ch.scalar().value();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double P = ch.ric(i, j).value() - 0.25 * R * ch.g(i, j).value();
        worst = std::max(worst, std::abs(s.g2(i, j) + P));
      }
    }
  }
  return worst;
}

VolumeFit renormalized_volume(const Model& model, const std::vector<double>& eps, const QuadratureRule& rule) {
  Collar c = collar_of(model);
  if (eps.size() < 4) throw std::invalid_argument("renormalized volume needs at least 4 eps values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1]))) {
      throw std::invalid_argument("eps values must be positive and strictly decreasing");
    }
  }
  if (!(eps.front() < model.collarDepth)) throw std::invalid_argument("eps values must lie below the collar depth");

  const MetricField& F = *c.field;
  const int a = c.face.axis;
  const double sgn = inward(c.face);
  const double L = c.length;
  auto nodes = face_nodes(F, c.face, rule.orderPerAxis);

  // Taylor coefficients f_0..f_4 of f(r) = int_Sigma sqrt(det gbar) at r = 0.
  std::vector<std::array<double, 5>> taylor(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    std::array<Jet<4>, 4> vars;
    for (int k = 0; k < 4; ++k) vars[k] = k == a ? Jet<4>::variable(a, c.xf, 4) : Jet<4>(nodes[i].first[k], 4);
    Jet<4> s = sqrt(det4(F.jets<4>(vars)));
    for (int k = 0; k <= 4; ++k) {
      Jet<4>::Multi m{0, 0, 0, 0};
      m[a] = k;
      taylor[i][k] = nodes[i].second * s.coeff(m) * std::pow(sgn, k);
    }
  });
  std::array<double, 5> f{};
  for (int k = 0; k <= 4; ++k) {
    std::vector<double> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = taylor[i][k];
    f[k] = pairwise_sum(v);
  }

  // int_0^L (f - T_3) / r^4 dr by Gauss-Legendre in r.
  const GaussRule& g = gauss_legendre(rule.orderPerAxis);
  std::vector<double> radial(g.nodes.size() * nodes.size());
  parallel_for(radial.size(), [&](std::size_t idx) {
    const std::size_t j = idx / nodes.size(), i = idx % nodes.size();
    const double r = 0.5 * L * (1.0 + g.nodes[j]);
    Point x = shifted(nodes[i].first, a, sgn * r);
    radial[idx] = nodes[i].second * std::sqrt(F.value(x).determinant());
  });
  std::vector<double> m(g.nodes.size());
  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
    const double r = 0.5 * L * (1.0 + g.nodes[j]);
    const double fr = pairwise_sum(radial.data() + j * nodes.size(), nodes.size());
    const double t3 = f[0] + r * (f[1] + r * (f[2] + r * f[3]));
    m[j] = 0.5 * L * g.weights[j] * (fr - t3) / std::pow(r, 4);
  }
  const long double Im = pairwise_sum(m);

  VolumeFit out;
  out.eps = eps;
  const long double Ll = L;
  // int_0^eps of the remainder is f_4 eps to O(eps^2).
  std::vector<long double> vol;
  for (double e : eps) {
    const long double el = e;
    vol.push_back(f[0] / 3.0L * (1.0L / (el * el * el) - 1.0L / (Ll * Ll * Ll)) +
                  f[1] / 2.0L * (1.0L / (el * el) - 1.0L / (Ll * Ll)) + f[2] * (1.0L / el - 1.0L / Ll) +
                  f[3] * std::log(Ll / el) + Im - f[4] * el);
    out.volume.push_back(static_cast<double>(vol.back()));
  }

  // Least squares in {eps^-3, eps^-1, 1}, scaled by the largest eps.
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const int n = static_cast<int>(eps.size());
  const long double e0 = eps.front();
  auto fit = [&](const std::vector<int>& powers, VecL& coef) {
    MatL A(n, powers.size());
    VecL b(n);
    for (int k = 0; k < n; ++k) {
      const long double u = e0 / static_cast<long double>(eps[k]);
      for (std::size_t j = 0; j < powers.size(); ++j) A(k, j) = std::pow(u, static_cast<long double>(powers[j]));
    }
    for (int k = 0; k < n; ++k) b(k) = vol[k];
    Eigen::ColPivHouseholderQR<MatL> qr(A);
    if (qr.rank() < static_cast<int>(powers.size())) throw FitIllConditioned("volume fit is rank deficient");
    coef = qr.solve(b);
    return (A * coef - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
  };
  VecL c3;
  out.fitResidual = static_cast<double>(fit({3, 1, 0}, c3));
  out.c0 = static_cast<double>(c3(0) * e0 * e0 * e0);
  out.c2 = static_cast<double>(c3(1) * e0);
  out.V = static_cast<double>(c3(2));
  VecL c4;
  fit({3, 2, 1, 0}, c4);
  out.diagnosticCm2 = static_cast<double>(c4(1) * e0 * e0);
  return out;
}

CceReport cce_consistency_report(const Model& model, const QuadratureRule& rule) {
  validate_conformally_compact(model);
  const ConformallyCompactData& cc = *model.cc;
  Collar c = collar_of(model);
  CceReport rep;
  rep.isEinstein = cc.isEinstein;
  rep.invariants = invariants_report(model, rule);
  rep.fg = fg_coefficients(model);
  rep.windowA = renormalized_volume(model, cc.epsWindowA, rule);
  rep.V = rep.windowA.V;
  if (cc.epsWindowB.size() >= 4) {
    rep.windowB = renormalized_volume(model, cc.epsWindowB, rule);
    rep.windowSpread = std::abs(rep.windowA.V - rep.windowB.V) / std::abs(rep.V);
  }
  rep.schouten = fg_schouten_residual(model, rep.fg);

  const auto t = tangent_axes(c.face.axis);
  double sg3 = 0.0;
  for (const FGSample& s : rep.fg.samples) {
    Point p{};
    for (int i = 0; i < 3; ++i) p[t[i]] = s.y[i];
    p[c.face.axis] = c.xf;
    Mat3 S = boundary_geometry(*c.field, c.face, p, true).S;
    rep.maxS = std::max(rep.maxS, S.cwiseAbs().maxCoeff());
    sg3 = std::max(sg3, (S + 1.5 * s.g3).cwiseAbs().maxCoeff());
  }

  // |W|^2 dv on g+ = gbar / r^2 at the same quadrature nodes.
  Expr dist = Expr(inward(c.face)) * (Expr::var(c.face.axis) - Expr(c.xf));
  MetricField gplus = c.field->rescaled(-log(dist));
  const double wPlus = integrate_bulk(gplus, [](const CurvatureBundle& b, const Point&) { return b.weylNormSq; }, rule);
  rep.weylRoutes = std::abs(rep.invariants.weylEnergy - wPlus);

  if (cc.isEinstein) {
    const double eight_pi2 = 8.0 * pi * pi;
    rep.anderson = std::abs(eight_pi2 * model.chi - rep.invariants.weylEnergy - 6.0 * rep.V) / eight_pi2;
    rep.energyVolume = std::abs(rep.invariants.Einv - 1.5 * rep.V) / std::abs(1.5 * rep.V);
    rep.sVersusG3 = sg3;
    rep.einstein = einstein_residual(model);
  }
  return rep;
}

}  // namespace confbound
