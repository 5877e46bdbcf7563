#include <cmath>
#include <numbers>

#include "confbound/integrals.hpp"
#include "doctest.h"

using namespace confbound;
using std::numbers::pi;

namespace {

bool has_conclusion(const HypothesisReport& h, const std::string& id) {
  for (const Conclusion& c : h.conclusions) {
    if (c.id == id) return true;
  }
  return false;
}

MetricField flat_box(const Expr& g33) {
  MetricField::Components g;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) g[a][b] = Expr(a == b ? 1.0 : 0.0);
  }
  g[3][3] = g33;
  return MetricField(g, Box{{0, 0, 0, 0}, {1, 1, 1, 1}});
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {2, 5, 8, 24}) {
    CAPTURE(n);
    const GaussRule& g = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : g.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += g.weights[i] * std::pow(g.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(std::abs(q - exact) < 1e-13);
    }
  }
}

TEST_CASE("bulk quadrature is exact on polynomial densities") {
  BulkIntegrand one = [](const CurvatureBundle&, const Point&) { return 1.0; };
  CHECK(integrate_bulk(flat_box(Expr(1.0)), one) == doctest::Approx(1.0).epsilon(1e-14));
  Expr p = Expr(1.0) + pow(Expr::var(0), Expr(6.0)) * pow(Expr::var(1), Expr(4.0));
  CHECK(integrate_bulk(flat_box(p * p), one, QuadratureRule{4}) ==
        doctest::Approx(1.0 + 1.0 / 35.0).epsilon(1e-14));
}

TEST_CASE("volumes and areas") {
  BulkIntegrand one = [](const CurvatureBundle&, const Point&) { return 1.0; };
  BoundaryIntegrand area = [](const BoundaryGeometry&, const Point&) { return 1.0; };
  Model s4 = catalog_model("round-s4");
  CHECK(integrate_bulk(s4.field, one) == doctest::Approx(8.0 * pi * pi / 3.0).epsilon(1e-6));

  Model hemi = catalog_model("hemisphere");
  BulkIntegrand s2 = [](const CurvatureBundle& c, const Point&) { return c.sigma2P; };
  CHECK(integrate_bulk(hemi.field, s2) == doctest::Approx(2.0 * pi * pi).epsilon(1e-6));
  BoundaryIntegrand H = [](const BoundaryGeometry& b, const Point&) { return b.H; };
  CHECK(std::abs(integrate_boundary(hemi.field, hemi.boundary[0], H)) < 1e-12);

  Model ball = catalog_model("flat-ball");
  CHECK(integrate_boundary(ball.field, ball.boundary[0], area) == doctest::Approx(2.0 * pi * pi).epsilon(1e-10));
  BoundaryIntegrand B = [](const BoundaryGeometry& b, const Point&) { return b.Bintegrand; };
  CHECK(integrate_boundary(ball.field, ball.boundary[0], B) == doctest::Approx(4.0 * pi * pi).epsilon(1e-10));
}

TEST_CASE("invariant reports") {
  SUBCASE("hemisphere") {
    InvariantReport r = invariants_report(catalog_model("hemisphere"));
    CHECK(std::abs(r.weylEnergy) < 1e-10);
    CHECK(r.Einv == doctest::Approx(2.0 * pi * pi).epsilon(1e-5));
    REQUIRE(r.betaB.has_value());
    CHECK(std::abs(*r.betaB) < 1e-10);
    CHECK(std::abs(r.cgbResidual) / (8.0 * pi * pi) < 1e-5);
    CHECK(r.Fb == doctest::Approx(8.0 * std::sqrt(3.0) * pi).epsilon(1e-9));
    CHECK(r.Einv == r.sigma2Integral + 0.5 * r.boundaryB);
  }
  SUBCASE("flat ball") {
    InvariantReport r = invariants_report(catalog_model("flat-ball"));
    CHECK(std::abs(r.sigma2Integral) < 1e-12);
    CHECK(r.boundaryB == doctest::Approx(4.0 * pi * pi).epsilon(1e-5));
    CHECK(r.Einv == doctest::Approx(2.0 * pi * pi).epsilon(1e-5));
    CHECK(std::abs(r.cgbResidual) / (8.0 * pi * pi) < 1e-5);
  }
  SUBCASE("S2 x S2") {
    InvariantReport r = invariants_report(catalog_model("s2xs2"));
    CHECK(r.chi == 4);
    CHECK(r.weylEnergy == doctest::Approx(64.0 * pi * pi / 3.0).epsilon(1e-4));
    CHECK(r.sigma2Integral == doctest::Approx(8.0 * pi * pi / 3.0).epsilon(1e-4));
    REQUIRE(r.betaB.has_value());
    CHECK(*r.betaB == doctest::Approx(8.0).epsilon(1e-4));
  }
  SUBCASE("beta is undefined when the energy is not positive") {
    Model m = catalog_model("flat-ball");
    m.boundary.clear();
    InvariantReport r = invariants_report(m);
    CHECK(r.Einv <= 1e-12);
    CHECK_FALSE(r.betaB.has_value());
  }
}

TEST_CASE("CGB residual on every catalog model") {
  for (const std::string& name : catalog_names()) {
    CAPTURE(name);
    InvariantReport r = invariants_report(catalog_model(name));
    CHECK(std::abs(r.cgbResidual) / (8.0 * pi * pi) < 1e-5);
  }
}

TEST_CASE("hypothesis reports") {
  SUBCASE("hemisphere") {
    HypothesisReport h = hypothesis_report(catalog_model("hemisphere"));
    CHECK(h.bachFlat);
    CHECK(h.sFlat);
    CHECK(h.umbilic);
    CHECK(h.totallyGeodesic);
    CHECK(h.betaBelow4);
    CHECK(has_conclusion(h, "rigidity-beta"));
  }
  SUBCASE("flat ball") {
    HypothesisReport h = hypothesis_report(catalog_model("flat-ball"));
    CHECK(h.bachFlat);
    CHECK(h.sFlat);
    CHECK(h.umbilic);
    CHECK_FALSE(h.totallyGeodesic);
    CHECK(has_conclusion(h, "rigidity-beta"));
    CHECK(has_conclusion(h, "rigidity-energy"));
  }
  SUBCASE("bump-perturbed ball") {
    HypothesisReport h = hypothesis_report(catalog_model("bump(0.05, 1)"));
    CHECK_FALSE(h.bachFlat);
    for (const char* id : {"rigidity-beta", "rigidity-energy", "rigidity-weyl-functional"}) {
      CHECK_FALSE(has_conclusion(h, id));
    }
  }
  SUBCASE("closed manifolds get no boundary conclusions") {
    CHECK(hypothesis_report(catalog_model("round-s4")).conclusions.empty());
  }
  SUBCASE("deterministic") {
    Model m = catalog_model("bump(0.05, 1)");
    HypothesisReport a = hypothesis_report(m), b = hypothesis_report(m);
    CHECK(a.invariants.Einv == b.invariants.Einv);
    CHECK(a.invariants.Wb == b.invariants.Wb);
    CHECK(a.bachNorm == b.bachNorm);
    CHECK(a.sNorm == b.sNorm);
    CHECK(a.conclusions.size() == b.conclusions.size());
  }
}
