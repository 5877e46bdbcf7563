// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "confbound/cce.hpp"
#include "confbound/commands.hpp"
#include "confbound/conformal.hpp"

using namespace confbound;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
  template <class T>
  void note(const char* key, T v) {
    detail << " " << key << "=" << v;
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Uniform points inside the box, 5% away from every face.
// Uniform points of the chart at which the metric has condition number at
// most 1e3; polar coordinates degenerate near their axes.
std::vector<Point> random_points(const MetricField& f, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Box box = f.domain();
  std::vector<Point> out;
  while (static_cast<int>(out.size()) < n) {
    Point x;
    for (int k = 0; k < 4; ++k) x[k] = box.lo[k] + u(rng) * (box.hi[k] - box.lo[k]);
    Eigen::SelfAdjointEigenSolver<Mat4> es(f.value(x));
    if (es.eigenvalues().maxCoeff() <= 1e3 * es.eigenvalues().minCoeff()) out.push_back(x);
  }
  return out;
}

void hemisphere_anchor(Outcome& o) {
  InvariantReport r = invariants_report(catalog_model("hemisphere"));
  const double cgb = std::abs(r.cgbResidual) / (8 * pi * pi);
  o.note("E_relerr", rel(r.Einv, 2 * pi * pi));
  o.note("beta", r.betaB.value_or(NAN));
  o.note("cgb", cgb);
  o.check(rel(r.Einv, 2 * pi * pi) < 1e-5, "E = 2 pi^2");
  o.check(r.betaB && std::abs(*r.betaB) < 1e-12, "beta_b = 0");
  o.check(cgb < 1e-5, "CGB residual");
  o.check(r.chi == 1, "chi = 1");
}

void flat_ball_anchor(Outcome& o) {
  InvariantReport r = invariants_report(catalog_model("flat-ball"));
  const double cgb = std::abs(r.cgbResidual) / (8 * pi * pi);
  o.note("B_relerr", rel(r.boundaryB, 4 * pi * pi));
  o.note("E_relerr", rel(r.Einv, 2 * pi * pi));
  o.note("cgb", cgb);
  o.check(rel(r.boundaryB, 4 * pi * pi) < 1e-5, "int B = 4 pi^2");
  o.check(rel(r.Einv, 2 * pi * pi) < 1e-5, "E = 2 pi^2");
  o.check(cgb < 1e-5, "CGB residual");
}

void s2xs2_anchor(Outcome& o) {
  InvariantReport r = invariants_report(catalog_model("s2xs2"));
  o.note("W_relerr", rel(r.weylEnergy, 64 * pi * pi / 3));
  o.note("sigma2_relerr", rel(r.sigma2Integral, 8 * pi * pi / 3));
  o.note("beta", r.betaB.value_or(NAN));
  o.check(rel(r.weylEnergy, 64 * pi * pi / 3) < 1e-4, "int |W|^2 = 64 pi^2/3");
  o.check(rel(r.sigma2Integral, 8 * pi * pi / 3) < 1e-4, "int sigma2 = 8 pi^2/3");
  o.check(r.betaB && rel(*r.betaB, 8.0) < 1e-4, "beta = 8");
}

void bach_cross_check(Outcome& o) {
  double cross = 0.0;
  for (const char* name : {"flat-ball", "hemisphere", "s2xs2", "bump(0.01, 1)"}) {
    Model m = catalog_model(name);
    auto pts = random_points(m.field, 100, 11);
    std::vector<double> d(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      d[i] = (bach(m.field, pts[i]) - bach_rewritten(m.field, pts[i]).total).cwiseAbs().maxCoeff();
    });
    for (double v : d) cross = std::max(cross, v);
  }
  double einstein = 0.0;
  std::vector<MetricField> fields;
  for (const char* name : {"round-s4", "s2xs2", "hemisphere", "cap(1)"}) fields.push_back(catalog_model(name).field);
  const Model hyp = catalog_model("hyperbolic-ball");
  fields.emplace_back(hyp.cc->gPlus, hyp.cc->chart);
  for (const MetricField& f : fields) {
    auto pts = random_points(f, 100, 12);
    std::vector<double> d(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { d[i] = bach(f, pts[i]).cwiseAbs().maxCoeff(); });
    for (double v : d) einstein = std::max(einstein, v);
  }
  o.note("cross", cross);
  o.note("einstein_supB", einstein);
  o.check(cross < 1e-7, "bach vs rewritten");
  o.check(einstein < 1e-8, "Einstein metrics are Bach-flat");
}

void boundary_expansion(Outcome& o) {
  struct Pattern {
    const char* model;
    std::array<double, 5> multiple;  // h^(k) = multiple[k] * h0
  };
  double disc = 0.0, pattern = 0.0;
  for (const Pattern& p : {Pattern{"hemisphere", {1, 0, -2, 0, 8}}, Pattern{"flat-ball", {1, -2, 2, 0, 0}}}) {
    Model m = catalog_model(p.model);
    for (const Point& x : face_samples(m.field, m.boundary[0], 3)) {
      ExpansionCoefficients e = expansion_coefficients(m.field, m.boundary[0], x);
      disc = std::max(disc, e.discrepancy);
      for (int k = 1; k <= 4; ++k) {
        pattern = std::max(pattern, (e.direct[k] - p.multiple[k] * e.direct[0]).cwiseAbs().maxCoeff());
      }
    }
  }
  o.note("discrepancy", disc);
  o.note("pattern", pattern);
  o.check(disc < 1e-6, "Taylor vs curvature formulas");
  o.check(pattern < 1e-6, "coefficient patterns");
}

void geodesic_identities(Outcome& o) {
  std::vector<std::string> models = {"hemisphere"};
  for (int s = 1; s <= 5; ++s) models.push_back("even-collar(" + std::to_string(s) + ")");
  double worst = 0.0;
  bool tg = true;
  for (const std::string& name : models) {
    Model m = catalog_model(name);
    for (const Point& x : face_samples(m.field, m.boundary[0], 3)) {
      GeodesicIdentities g = geodesic_boundary_identities(m.field, m.boundary[0], x);
      tg = tg && g.totallyGeodesic;
      for (double r : g.residuals) worst = std::max(worst, r);
    }
  }
  o.note("max_residual", worst);
  o.check(tg, "boundaries are totally geodesic");
  o.check(worst < 1e-7, "six identities");
}

void doubling_parity(Outcome& o) {
  bool even_zero = true;
  for (const char* name : {"hemisphere", "flat-ball", "bump(0.05, 1)", "even-collar(1)", "cap(1)"}) {
    DoublingReport d = doubling_report(catalog_model(name).field);
    even_zero = even_zero && d.jump[1] == 0.0 && d.jump[3] == 0.0;
  }
  DoublingReport hemi = doubling_report(catalog_model("hemisphere").field);
  DoublingReport flat = doubling_report(catalog_model("flat-ball").field);
  double hmax = 0.0;
  for (double j : hemi.jump) hmax = std::max(hmax, j);
  o.note("hemisphere_max_jump", hmax);
  o.note("flat_jump1", flat.jump[0]);
  o.check(even_zero, "even-order jumps exactly 0");
  o.check(hmax < 1e-9, "hemisphere double is smooth");
  o.check(flat.jump[0] > 0.1, "flat-ball Jump(1) > 0.1");
}

void conformal_invariance(Outcome& o) {
  double integrated = 0.0, bachLaw = 0.0, sLaw = 0.0;
  for (const char* name : {"hemisphere", "flat-ball", "bump(0.05, 1)"}) {
    Model m = catalog_model(name);
    const InvariantReport before = invariants_report(m);
    for (unsigned seed = 1; seed <= 10; ++seed) {
      InvarianceResiduals r = invariance_residuals(m, random_conformal_factor(m, seed), before, {}, true);
      integrated = std::max(integrated, r.Wb / std::max(1.0, std::abs(r.before.Wb)));
      integrated = std::max(integrated, r.Einv / std::max(1.0, std::abs(r.before.Einv)));
      bachLaw = std::max(bachLaw, r.pointwise.bach);
      sLaw = std::max(sLaw, r.pointwise.sTensor);
      // Pointwise laws also for factors without the coordinate symmetry.
      PointwiseLaws p = pointwise_laws(m, random_conformal_factor(m, seed, 0.3, false));
      bachLaw = std::max(bachLaw, p.bach);
      sLaw = std::max(sLaw, p.sTensor);
    }
  }
  o.note("integrated", integrated);
  o.note("bach_law", bachLaw);
  o.note("S_law", sLaw);
  o.check(integrated < 1e-5, "W_b and E invariance");
  o.check(bachLaw < 1e-6, "Bach law");
  o.check(sLaw < 1e-6, "S law");
}

void cce_anchors(Outcome& o) {
  CceReport r = cce_consistency_report(catalog_model("hyperbolic-ball"));
  double g2 = 0.0;
  for (const FGSample& s : r.fg.samples) g2 = std::max(g2, (s.g2 + 0.5 * s.h).cwiseAbs().maxCoeff());
  const double V = 4 * pi * pi / 3;
  o.note("V_relerr", rel(r.V, V));
  o.note("anderson", r.anderson.value_or(NAN));
  o.note("E_vs_V", r.energyVolume.value_or(NAN));
  o.note("g2", g2);
  o.note("g3", r.fg.maxG3);
  o.note("S", r.maxS);
  o.note("S_vs_g3", r.sVersusG3.value_or(NAN));
  o.check(rel(r.V, V) < 1e-3, "V = 4 pi^2/3");
  o.check(r.anderson && *r.anderson < 1e-3, "Anderson");
  o.check(std::abs(r.invariants.weylEnergy) < 1e-6, "int |W|^2 = 0");
  o.check(r.energyVolume && *r.energyVolume < 1e-3, "E = 3V/2");
  o.check(g2 < 1e-4, "g2 = -h/2");
  o.check(r.fg.maxG3 < 1e-6, "g3 = 0");
  o.check(r.maxS < 1e-6, "S = 0");
  o.check(r.sVersusG3 && *r.sVersusG3 < 1e-6, "S = -3/2 g3");
}

void yamabe(Outcome& o) {
  const double target = 8 * std::sqrt(3.0) * pi;
  auto t0 = std::chrono::steady_clock::now();
  Model hemi = catalog_model("hemisphere"), flat = catalog_model("flat-ball");
  YamabeEstimate h = yamabe_estimate(hemi, default_yamabe_basis(hemi, 4));
  YamabeEstimate f = yamabe_estimate(flat, default_yamabe_basis(flat, 4));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.note("hemisphere_relerr", rel(h.value, target));
  o.note("flat_minus_target", f.value - target);
  o.note("seconds", secs);
  o.check(rel(h.value, target) < 1e-4, "hemisphere value");
  o.check(std::abs(f.value - target) < 1e-3, "flat-ball value");
  o.check(secs <= 300.0, "runtime");
}

void hypothesis_reports(Outcome& o) {
  const std::string hemisphere = "conformally equivalent to (S^4_+, S^3, g_{S^4_+})";
  auto lists_rigidity = [&](const HypothesisReport& h) {
    for (const Conclusion& c : h.conclusions) {
      if (c.statement == hemisphere) return true;
    }
    return false;
  };
  o.check(lists_rigidity(hypothesis_report(catalog_model("hemisphere"))), "hemisphere conclusion");
  o.check(lists_rigidity(hypothesis_report(catalog_model("flat-ball"))), "flat-ball conclusion");
  HypothesisReport bump = hypothesis_report(catalog_model("bump(0.05, 1)"));
  o.note("bump_conclusions", bump.conclusions.size());
  o.check(bump.conclusions.empty(), "bump lists none");
  CommandOptions opt;
  opt.model = "bump(0.05, 1)";
  o.check(run_command("hypotheses", opt).json() == run_command("hypotheses", opt).json(), "deterministic");
}

void quadrature_convergence(Outcome& o) {
  double finest = 0.0;
  for (const std::string& name : catalog_names()) {
    Model m = catalog_model(name);
    double prev = INFINITY;
    for (int order : {8, 16, 32}) {
      double res = std::abs(invariants_report(m, QuadratureRule{order}).cgbResidual);
      if (res > prev + 1e-12) {
        o.check(false, name + " at order " + std::to_string(order));
      }
      if (order == 32) finest = std::max(finest, res / (8 * pi * pi));
      prev = res;
    }
  }
  o.note("models", catalog_names().size());
  o.note("max_cgb_at_32", finest);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"hemisphere anchor", hemisphere_anchor},
      {"flat-ball anchor", flat_ball_anchor},
      {"S2xS2 anchor", s2xs2_anchor},
      {"Bach cross-check", bach_cross_check},
      {"boundary expansion", boundary_expansion},
      {"totally geodesic identities", geodesic_identities},
      {"doubling parity", doubling_parity},
      {"conformal invariance", conformal_invariance},
      {"CCE anchors", cce_anchors},
      {"Yamabe estimator", yamabe},
      {"hypothesis report", hypothesis_reports},
      {"quadrature convergence", quadrature_convergence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed;
}
