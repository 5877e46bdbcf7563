#include "confbound/integrals.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "confbound/errors.hpp"

namespace confbound {

using std::numbers::pi;

namespace {

struct AxisNodes {
  std::vector<double> x, w;
};

AxisNodes axis_nodes(double lo, double hi, int n, bool collapse) {
  AxisNodes a;
  if (collapse) {
    a.x = {0.5 * (lo + hi)};
    a.w = {hi - lo};
    return a;
  }
  const GaussRule& g = gauss_legendre(n);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
  for (int i = 0; i < n; ++i) {
    a.x.push_back(mid + half * g.nodes[i]);
    a.w.push_back(half * g.weights[i]);
  }
  return a;
}

std::string point_text(const Point& x, int dims = 4) {
  std::string s = "(";
  char buf[32];
  for (int k = 0; k < dims; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", x[k]);
    s += buf;
    if (k + 1 < dims) s += ", ";
  }
  return s + ")";
}

// Evaluates body at every node of the product grid and sums each of the
// `count` outputs times the node weight with pairwise summation in node
// order, so the result does not depend on the thread count.
std::vector<double> product_quadrature(const std::vector<AxisNodes>& axes, int count,
                                       const std::function<double(const Point&, double*)>& body,
                                       const std::vector<int>& axis_of) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.x.size();
  std::vector<double> values(total * count, 0.0);
  parallel_for(total, [&](std::size_t flat) {
    Point x{};
    double w = 1.0;
    std::size_t rem = flat;
    for (int k = static_cast<int>(axes.size()) - 1; k >= 0; --k) {
      std::size_t n = axes[k].x.size();
      std::size_t i = rem % n;
      rem /= n;
      x[axis_of[k]] = axes[k].x[i];
      w *= axes[k].w[i];
    }
    std::vector<double> out(count, 0.0);
    double density = body(x, out.data());
    for (int c = 0; c < count; ++c) {
      double v = out[c] * density * w;
      if (!std::isfinite(v)) {
        throw NodeEvaluationError("integrand is not finite at node " + point_text(x));
      }
      values[c * total + flat] = v;
    }
  });
  std::vector<double> sums(count);
  for (int c = 0; c < count; ++c) sums[c] = pairwise_sum(values.data() + c * total, total);
  return sums;
}

}  // namespace

std::vector<double> integrate_bulk_many(const MetricField& field, int count,
                                        const std::function<void(const CurvatureBundle&, const Point&, double*)>& f,
                                        const QuadratureRule& rule) {
  if (rule.orderPerAxis < 1) throw std::invalid_argument("quadrature order must be >= 1");
  std::vector<AxisNodes> axes;
  std::vector<int> axis_of;
  const Box& box = field.domain();
  for (int k = 0; k < 4; ++k) {
    axes.push_back(axis_nodes(box.lo[k], box.hi[k], rule.orderPerAxis, !field.depends_on(k)));
    axis_of.push_back(k);
  }
  return product_quadrature(
      axes, count,
      [&](const Point& x, double* out) {
        try {
          CurvatureBundle b = curvature_bundle(field, x);
          f(b, x, out);
          return std::sqrt(b.g.determinant());
        } catch (const NodeEvaluationError&) {
          throw;
        } catch (const std::exception& e) {
          throw NodeEvaluationError("evaluation failed at node " + point_text(x) + ": " + e.what());
        }
      },
      axis_of);
}

double integrate_bulk(const MetricField& field, const BulkIntegrand& f, const QuadratureRule& rule) {
  return integrate_bulk_many(
      field, 1, [&](const CurvatureBundle& b, const Point& x, double* out) { out[0] = f(b, x); }, rule)[0];
}

std::vector<double> integrate_boundary_many(
    const MetricField& field, const Face& face, int count,
    const std::function<void(const BoundaryGeometry&, const Point&, double*)>& f, const QuadratureRule& rule,
    bool with_s) {
  if (rule.orderPerAxis < 1) throw std::invalid_argument("quadrature order must be >= 1");
  std::vector<AxisNodes> axes;
  std::vector<int> axis_of;
  const Box& box = field.domain();
  for (int k : tangent_axes(face.axis)) {
    axes.push_back(axis_nodes(box.lo[k], box.hi[k], rule.orderPerAxis, !field.depends_on(k)));
    axis_of.push_back(k);
  }
  const double xf = face.upper ? box.hi[face.axis] : box.lo[face.axis];
  return product_quadrature(
      axes, count,
      [&](const Point& y, double* out) {
        Point x = y;
        x[face.axis] = xf;
        try {
          BoundaryGeometry b = boundary_geometry(field, face, x, with_s);
          f(b, x, out);
          return b.areaDensity;
        } catch (const NodeEvaluationError&) {
          throw;
        } catch (const std::exception& e) {
          throw NodeEvaluationError("evaluation failed at boundary node " + point_text(x) + ": " + e.what());
        }
      },
      axis_of);
}

double integrate_boundary(const MetricField& field, const Face& face, const BoundaryIntegrand& f,
                          const QuadratureRule& rule, bool with_s) {
  return integrate_boundary_many(
      field, face, 1, [&](const BoundaryGeometry& b, const Point& x, double* out) { out[0] = f(b, x); }, rule,
      with_s)[0];
}

InvariantReport invariants_report(const MetricField& field, const std::vector<Face>& boundary, int chi,
                                  const QuadratureRule& rule) {
  InvariantReport r;
  r.chi = chi;
  auto bulk = integrate_bulk_many(
      field, 4,
      [](const CurvatureBundle& b, const Point&, double* out) {
        out[0] = b.weylNormSq;
        out[1] = b.sigma2P;
        out[2] = b.scalar;
        out[3] = 1.0;
      },
      rule);
  r.weylEnergy = bulk[0];
  r.sigma2Integral = bulk[1];
  r.scalarIntegral = bulk[2];
  r.volume = bulk[3];
  for (const Face& f : boundary) {
    auto s = integrate_boundary_many(
        field, f, 4,
        [](const BoundaryGeometry& b, const Point&, double* out) {
          out[0] = b.Bintegrand;
          out[1] = b.weylNormalL;
          out[2] = b.H;
          out[3] = 1.0;
        },
        rule, false);
    r.boundaryB += s[0];
    r.weylNormalLIntegral += s[1];
    r.meanCurvatureIntegral += s[2];
    r.boundaryArea += s[3];
  }
  r.Einv = r.sigma2Integral + 0.5 * r.boundaryB;
  if (r.Einv > 0.0) r.betaB = r.weylEnergy / r.Einv;
  r.Wb = r.weylEnergy + 2.0 * r.weylNormalLIntegral;
  r.Fb = (r.scalarIntegral + 2.0 * r.meanCurvatureIntegral) / std::sqrt(r.volume);
  r.cgbResidual = 8.0 * pi * pi * chi - r.weylEnergy - 4.0 * r.Einv;
  return r;
}

InvariantReport invariants_report(const Model& model, const QuadratureRule& rule) {
  return invariants_report(model.field, model.boundary, model.chi, rule);
}

std::vector<Point> bulk_samples(const Box& box, int per_axis) {
  const GaussRule& g = gauss_legendre(per_axis);
  std::vector<Point> out;
  const int total = per_axis * per_axis * per_axis * per_axis;
  for (int flat = 0; flat < total; ++flat) {
    Point x{};
    int rem = flat;
    for (int k = 3; k >= 0; --k) {
      int i = rem % per_axis;
      rem /= per_axis;
      x[k] = 0.5 * (box.lo[k] + box.hi[k]) + 0.5 * (box.hi[k] - box.lo[k]) * g.nodes[i];
    }
    out.push_back(x);
  }
  return out;
}

HypothesisReport hypothesis_report(const Model& model, const QuadratureRule& rule, const TheoremConstants& eps,
                                   const HypothesisTolerances& tol) {
  HypothesisReport h;
  h.invariants = invariants_report(model, rule);
  const InvariantReport& inv = h.invariants;

  auto pts = bulk_samples(model.field.domain(), tol.bulkSamplesPerAxis);
  std::vector<double> bach_norm(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { bach_norm[i] = bach(model.field, pts[i]).cwiseAbs().maxCoeff(); });
  for (double b : bach_norm) h.bachNorm = std::max(h.bachNorm, b);

  for (const Face& f : model.boundary) {
    auto fp = face_samples(model.field, f, tol.boundarySamplesPerAxis);
    std::vector<BoundaryGeometry> geo(fp.size());
    parallel_for(fp.size(), [&](std::size_t i) { geo[i] = boundary_geometry(model.field, f, fp[i], true); });
    for (const auto& g : geo) {
      h.umbilicDefect = std::max(h.umbilicDefect, g.umbilicDefect);
      h.secondFundamentalNorm = std::max(h.secondFundamentalNorm, g.L.cwiseAbs().maxCoeff());
      h.sNorm = std::max(h.sNorm, g.S.cwiseAbs().maxCoeff());
    }
  }

  const double two_pi2 = 2.0 * pi * pi;
  h.yamabePositiveSurrogate = inv.Fb > 0.0;
  h.energyPositive = inv.Einv > 0.0;
  h.umbilic = h.umbilicDefect < tol.umbilic;
  h.totallyGeodesic = h.secondFundamentalNorm < tol.totallyGeodesic;
  h.bachFlat = h.bachNorm < tol.bach;
  h.sFlat = h.sNorm < tol.sTensor;
  if (inv.betaB) {
    h.betaBelow8 = *inv.betaB < 8.0;
    h.betaBelow4 = *inv.betaB < 4.0;
    h.betaBelow8Eps2 = *inv.betaB < 8.0 * (1.0 + eps.eps2);
  }
  // Relative slack on the closed inequality, so that the equality case is
  // not decided by quadrature rounding.
  h.energyAboveThreshold = inv.Einv >= 2.0 * (1.0 - eps.eps1) * pi * pi - tol.energySlack * two_pi2;
  h.WbBelow4Pi2 = inv.Wb < 4.0 * pi * pi;

  const bool y2 = h.yamabePositiveSurrogate && h.energyPositive && !model.boundary.empty();
  const bool critical = h.bachFlat && h.sFlat && h.umbilic;
  const std::string hemisphere = "conformally equivalent to (S^4_+, S^3, g_{S^4_+})";
  const std::string homology = "double homeomorphic to S^4, boundary a homology S^3, M a homology B^4";
  if (y2 && h.umbilic) {
    h.conclusions.push_back({"connected-boundary", "H^1(M, boundary) = H^1(M) = 0 and the boundary is connected"});
  }
  if (y2 && h.umbilic && h.betaBelow8) h.conclusions.push_back({"beta-below-8", homology});
  if (y2 && h.umbilic && h.betaBelow4) {
    h.conclusions.push_back({"beta-below-4", "M diffeomorphic to B^4 and the boundary diffeomorphic to S^3"});
  }
  if (y2 && critical && h.betaBelow4) h.conclusions.push_back({"rigidity-beta", hemisphere});
  if (y2 && critical && h.energyAboveThreshold) {
    h.conclusions.push_back({"rigidity-energy", hemisphere});
  }
  if (y2 && critical && h.WbBelow4Pi2) h.conclusions.push_back({"rigidity-weyl-functional", hemisphere});
  if (y2 && critical && h.betaBelow8Eps2) h.conclusions.push_back({"beta-below-8-critical", homology});
  return h;
}

}  // namespace confbound
