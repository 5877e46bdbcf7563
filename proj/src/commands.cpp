#include "confbound/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>

#include "confbound/cce.hpp"
#include "confbound/conformal.hpp"

namespace confbound {

namespace {

using std::numbers::pi;

const Face& first_face(const Model& m) {
  if (m.boundary.empty()) throw std::invalid_argument("model " + m.name + " has no boundary face");
  return m.boundary.front();
}

void put_invariants(Report& r, const std::string& prefix, const InvariantReport& inv) {
  r.set(prefix + "weylEnergy", inv.weylEnergy);
  r.set(prefix + "sigma2Integral", inv.sigma2Integral);
  r.set(prefix + "boundaryB", inv.boundaryB);
  r.set(prefix + "Einv", inv.Einv);
  if (inv.betaB) {
    r.set(prefix + "betaB", *inv.betaB);
  } else {
    r.set_null(prefix + "betaB");
  }
  r.set(prefix + "betaDefined", inv.betaB.has_value());
  r.set(prefix + "Wb", inv.Wb);
  r.set(prefix + "Fb", inv.Fb);
  r.set(prefix + "cgbResidual", inv.cgbResidual);
  r.set(prefix + "volume", inv.volume);
  r.set(prefix + "boundaryArea", inv.boundaryArea);
}

double floor_tol(const CommandOptions& o, double floor) { return std::max(o.tol, floor); }

void invariants(const Model& m, const CommandOptions& o, Report& r) {
  InvariantReport inv = invariants_report(m, QuadratureRule{o.quadOrder});
  put_invariants(r, "", inv);
  r.set("chi", inv.chi);
  r.set("scalarIntegral", inv.scalarIntegral);
  r.set("meanCurvatureIntegral", inv.meanCurvatureIntegral);
  r.set("weylNormalLIntegral", inv.weylNormalLIntegral);
}

void cgb(const Model& m, const CommandOptions& o, Report& r) {
  InvariantReport inv = invariants_report(m, QuadratureRule{o.quadOrder});
  const double eight_pi2 = 8.0 * pi * pi;
  r.set("chi", inv.chi);
  r.set("weylEnergy", inv.weylEnergy);
  r.set("Einv", inv.Einv);
  r.set("cgbResidual", inv.cgbResidual);
  r.assert_below("cgbRelative", std::abs(inv.cgbResidual) / eight_pi2, floor_tol(o, kQuadratureFloor));
}

void hypotheses(const Model& m, const CommandOptions& o, Report& r) {
  HypothesisTolerances tol;
  tol.umbilic = tol.totallyGeodesic = tol.bach = tol.sTensor = o.tol;
  HypothesisReport h = hypothesis_report(m, QuadratureRule{o.quadOrder}, o.eps, tol);
  put_invariants(r, "invariants.", h.invariants);
  r.set("eps", o.eps.eps);
  r.set("eps1", o.eps.eps1);
  r.set("eps2", o.eps.eps2);
  r.set("yamabePositiveSurrogate", h.yamabePositiveSurrogate);
  r.set("yamabeSurrogateNote", "F_b > 0 at this representative; necessary-condition surrogate, not a certificate");
  r.set("energyPositive", h.energyPositive);
  r.set("umbilic", h.umbilic);
  r.set("totallyGeodesic", h.totallyGeodesic);
  r.set("bachFlat", h.bachFlat);
  r.set("sFlat", h.sFlat);
  r.set("betaBelow8", h.betaBelow8);
  r.set("betaBelow4", h.betaBelow4);
  r.set("betaBelow8Eps2", h.betaBelow8Eps2);
  r.set("energyAboveThreshold", h.energyAboveThreshold);
  r.set("WbBelow4Pi2", h.WbBelow4Pi2);
  r.set("umbilicDefect", h.umbilicDefect);
  r.set("secondFundamentalNorm", h.secondFundamentalNorm);
  r.set("bachNorm", h.bachNorm);
  r.set("sNorm", h.sNorm);
  std::string ids;
  for (const Conclusion& c : h.conclusions) {
    ids += (ids.empty() ? "" : ",") + c.id;
    r.set("conclusion." + c.id, c.statement);
  }
  r.set("conclusions", ids);
}

void expansion(const Model& m, const CommandOptions& o, Report& r) {
  const Face& face = first_face(m);
  auto pts = face_samples(m.field, face, 3);
  std::vector<ExpansionCoefficients> ex(pts.size());
  std::vector<double> sign(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    ex[i] = expansion_coefficients(m.field, face, pts[i]);
    BoundaryGeometry b = boundary_geometry(m.field, face, pts[i], false);
    sign[i] = (ex[i].direct[1] + 2.0 * b.L).cwiseAbs().maxCoeff();
  });
  double disc = 0.0, h1 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    disc = std::max(disc, ex[i].discrepancy);
    h1 = std::max(h1, sign[i]);
  }
  r.set("samples", static_cast<int>(pts.size()));
  for (int k = 0; k < 4; ++k) r.set("samplePoint." + std::to_string(k), pts[0][k]);
  for (int k = 0; k <= 4; ++k) {
    r.set("direct.h" + std::to_string(k), ex[0].direct[k]);
    if (k > 0) r.set("formula.h" + std::to_string(k), ex[0].formula[k]);
  }
  r.assert_below("discrepancy", disc, o.tol);
  r.assert_below("h1PlusTwoL", h1, o.tol);
}

void doubling(const Model& m, const CommandOptions&, Report& r) {
  first_face(m);
  DoublingReport d = doubling_report(m.field);
  r.set("samples", d.samples);
  int smooth = 0;
  while (smooth < 4 && d.jump[smooth] < 1e-9) ++smooth;
  for (int k = 0; k < 4; ++k) r.set("jump" + std::to_string(k + 1), d.jump[k]);
  r.set("continuousDerivatives", smooth);
}

void geodesic_id(const Model& m, const CommandOptions& o, Report& r) {
  const Face& face = first_face(m);
  auto pts = face_samples(m.field, face, 3);
  std::vector<GeodesicIdentities> gi(pts.size());
  std::vector<H3VersusS> hs(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    gi[i] = geodesic_boundary_identities(m.field, face, pts[i]);
    hs[i] = h3_vs_S(m.field, face, pts[i]);
  });
  bool tg = true, valid = true;
  std::array<double, 6> res{};
  double l = 0.0, h3 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    tg = tg && gi[i].totallyGeodesic;
    valid = valid && hs[i].valid();
    l = std::max(l, gi[i].secondFundamentalNorm);
    h3 = std::max(h3, hs[i].residual);
    for (int k = 0; k < 6; ++k) res[k] = std::max(res[k], gi[i].residuals[k]);
  }
  r.set("samples", static_cast<int>(pts.size()));
  r.set("totallyGeodesic", tg);
  r.set("secondFundamentalNorm", l);
  for (int k = 0; k < 6; ++k) {
    const std::string key = std::string("identity.") + GeodesicIdentities::names()[k];
    if (tg) {
      r.assert_below(key, res[k], o.tol);
    } else {
      r.set(key, res[k]);
    }
  }
  r.set("h3VersusS.valid", valid);
  if (valid) {
    r.assert_below("h3VersusS.residual", h3, o.tol);
  } else {
    r.set("h3VersusS.residual", h3);
  }
}

void conformal_check(const Model& m, const CommandOptions& o, Report& r) {
  Expr w = o.w ? parse(*o.w, m.coords) : random_conformal_factor(m, o.seed);
  r.set("w", w.to_string());
  if (!o.w) r.set("seed", static_cast<int>(o.seed));
  InvarianceResiduals res = invariance_residuals(m, w, QuadratureRule{o.quadOrder}, true);
  put_invariants(r, "before.", res.before);
  put_invariants(r, "after.", res.after);
  const double floor = floor_tol(o, kQuadratureFloor);
  r.assert_below("residual.Wb", res.Wb / std::max(1.0, std::abs(res.before.Wb)), floor);
  r.assert_below("residual.Einv", res.Einv / std::max(1.0, std::abs(res.before.Einv)), floor);
  if (res.betaB) {
    r.assert_below("residual.betaB", *res.betaB / std::max(1.0, std::abs(*res.before.betaB)), floor);
  } else {
    r.set_null("residual.betaB");
  }
  r.assert_below("residual.bachLaw", res.pointwise.bach, o.tol);
  r.assert_below("residual.scalarLaw", res.pointwise.scalar, o.tol);
  if (!m.boundary.empty()) r.assert_below("residual.sLaw", res.pointwise.sTensor, o.tol);
}

void yamabe(const Model& m, const CommandOptions& o, Report& r) {
  auto basis = default_yamabe_basis(m, o.basis);
  YamabeEstimate e = yamabe_estimate(m, basis, {}, QuadratureRule{o.quadOrder});
  r.set("basisSize", o.basis);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    r.set("basis." + std::to_string(k), e.basis[k]);
    r.set("coefficient." + std::to_string(k), e.coefficients[k]);
  }
  r.set("start", e.start);
  r.set("value", e.value);
  r.set("iterations", e.iterations);
  r.set("converged", e.converged);
  r.assert_below("minimalityExcess", std::max(0.0, e.value - e.start), o.tol);
}

void put_fit(Report& r, const std::string& prefix, const VolumeFit& f) {
  for (std::size_t k = 0; k < f.eps.size(); ++k) {
    r.set(prefix + "eps." + std::to_string(k), f.eps[k]);
    r.set(prefix + "volume." + std::to_string(k), f.volume[k]);
  }
  r.set(prefix + "c0", f.c0);
  r.set(prefix + "c2", f.c2);
  r.set(prefix + "V", f.V);
  r.set(prefix + "fitResidual", f.fitResidual);
  r.set(prefix + "diagnosticCm2", f.diagnosticCm2);
}

void renvol(const Model& m, const CommandOptions& o, Report& r) {
  validate_conformally_compact(m);
  const QuadratureRule rule{o.quadOrder};
  VolumeFit a = renormalized_volume(m, m.cc->epsWindowA, rule);
  put_fit(r, "windowA.", a);
  r.set("V", a.V);
  r.assert_below("diagnosticCm2", std::abs(a.diagnosticCm2), floor_tol(o, kVolumeFloor));
  if (m.cc->epsWindowB.size() >= 4) {
    VolumeFit b = renormalized_volume(m, m.cc->epsWindowB, rule);
    put_fit(r, "windowB.", b);
    r.assert_below("windowSpread", std::abs(a.V - b.V) / std::abs(a.V), floor_tol(o, kFitFloor));
  }
}

void cce_check(const Model& m, const CommandOptions& o, Report& r) {
  CceReport c = cce_consistency_report(m, QuadratureRule{o.quadOrder});
  put_invariants(r, "invariants.", c.invariants);
  r.set("isEinstein", c.isEinstein);
  r.set("V", c.V);
  r.set("windowA.V", c.windowA.V);
  r.set("windowB.V", c.windowB.V);
  r.set("maxS", c.maxS);
  r.set("fgFitResidual", c.fg.fitResidual);
  if (!c.fg.samples.empty()) {
    const FGSample& s = c.fg.samples.front();
    for (int k = 0; k < 3; ++k) r.set("fgSample.y" + std::to_string(k), s.y[k]);
    r.set("fgSample.h", s.h);
    r.set("fgSample.g2", s.g2);
    r.set("fgSample.g3", s.g3);
  }
  r.assert_below("maxG1", c.fg.maxG1, o.tol);
  r.set("maxG3", c.fg.maxG3);
  r.assert_below("windowSpread", c.windowSpread, floor_tol(o, kFitFloor));
  r.assert_below("schouten", c.schouten, floor_tol(o, kFitFloor));
  r.assert_below("weylRoutes", c.weylRoutes / std::max(1.0, std::abs(c.invariants.weylEnergy)),
                 floor_tol(o, kQuadratureFloor));
  if (c.isEinstein) {
    r.assert_below("anderson", *c.anderson, floor_tol(o, kVolumeFloor));
    r.assert_below("energyVolume", *c.energyVolume, floor_tol(o, kVolumeFloor));
    r.assert_below("sVersusG3", *c.sVersusG3, o.tol);
    r.assert_below("einstein", *c.einstein, o.tol);
  } else {
    for (const char* k : {"anderson", "energyVolume", "sVersusG3", "einstein"}) r.set_null(k);
  }

  GeodesicOptions go;
  go.withMetric = false;
  GeodesicReport g = geodesic_defining_function(m, Expr(0.0), go);
  r.set("geodesic.trajectories", static_cast<int>(g.trajectories.size()));
  r.assert_below("geodesic.constraint", g.constraint, o.tol);
  if (g.analyticResidual) {
    r.assert_below("geodesic.analyticResidual", *g.analyticResidual, o.tol);
  } else {
    r.set_null("geodesic.analyticResidual");
  }
}

using Handler = std::function<void(const Model&, const CommandOptions&, Report&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"invariants", invariants}, {"cgb", cgb},
      {"hypotheses", hypotheses}, {"expansion", expansion},
      {"double", doubling},       {"geodesic-id", geodesic_id},
      {"conformal-check", conformal_check}, {"yamabe", yamabe},
      {"renvol", renvol},         {"cce-check", cce_check},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"invariants", "cgb",           "hypotheses",      "expansion",
                                                 "double",     "geodesic-id",   "conformal-check", "yamabe",
                                                 "renvol",     "cce-check"};
  return names;
}

Report run_command(const std::string& name, const CommandOptions& opt) {
  auto it = handlers().find(name);
  if (it == handlers().end()) throw std::invalid_argument("unknown command: " + name);
  if (opt.quadOrder < 2) throw std::invalid_argument("quadrature order must be at least 2");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  Model m = resolve_model(opt.model);
  Report r;
  r.set("command", name);
  r.set("model", m.name);
  r.set("quadOrder", opt.quadOrder);
  r.set("tol", opt.tol);
  r.set("version", kVersion);
  it->second(m, opt, r);
  return r;
}

}  // namespace confbound
