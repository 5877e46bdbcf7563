#include <cmath>
#include <numbers>

#include "confbound/conformal.hpp"
#include "doctest.h"

using namespace confbound;
using std::numbers::pi;

namespace {

const double kYamabeHemisphere = 8.0 * std::sqrt(3.0) * pi;

}  // namespace

TEST_CASE("w = 0 leaves the metric unchanged") {
  Model m = catalog_model("bump(0.05, 2)");
  MetricField g = rescale(m.field, Expr(0.0));
  for (const Point& x : bulk_samples(m.field.domain(), 2)) {
    CHECK((g.value(x) - m.field.value(x)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("stereographic factor turns the flat ball into the round hemisphere") {
  Model m = catalog_model("flat-ball");
  Expr rad = Expr(1.0) - Expr::var(0);
  Expr w = log(Expr(2.0) / (Expr(1.0) + rad * rad));
  MetricField g = rescale(m.field, w);
  for (const Point& x : bulk_samples(m.field.domain(), 3)) {
    CHECK(curvature_bundle(g, x).scalar == doctest::Approx(12.0).epsilon(1e-10));
  }
  InvariantReport r = invariants_report(g, m.boundary, m.chi);
  CHECK(r.Fb == doctest::Approx(kYamabeHemisphere).epsilon(1e-9));
}

TEST_CASE("scalar curvature law on every catalog model") {
  for (const std::string& name : catalog_names()) {
    CAPTURE(name);
    Model m = catalog_model(name);
    for (unsigned seed : {1u, 2u}) {
      PointwiseLaws p = pointwise_laws(m, random_conformal_factor(m, seed, 0.3, false));
      CHECK(p.scalar < 1e-7);
    }
  }
}

TEST_CASE("Bach and S laws") {
  SUBCASE("S2 x S2, random factor") {
    Model m = catalog_model("s2xs2");
    for (unsigned seed = 1; seed <= 3; ++seed) {
      CHECK(pointwise_laws(m, random_conformal_factor(m, seed, 0.3, false)).bach < 1e-6);
    }
  }
  SUBCASE("non-umbilic bump collar") {
    Model m = catalog_model("bump(0.05, 1)");
    for (unsigned seed = 1; seed <= 3; ++seed) {
      PointwiseLaws p = pointwise_laws(m, random_conformal_factor(m, seed, 0.3, false));
      CHECK(p.bach < 1e-6);
      CHECK(p.sTensor < 1e-6);
    }
  }
  SUBCASE("spherical cap") {
    Model m = catalog_model("cap(2)");
    PointwiseLaws p = pointwise_laws(m, random_conformal_factor(m, 4, 0.3, false));
    CHECK(p.bach < 1e-6);
    CHECK(p.sTensor < 1e-6);
  }
}

TEST_CASE("integrated invariants do not change under rescaling") {
  SUBCASE("hemisphere") {
    Model m = catalog_model("hemisphere");
    auto r = invariance_residuals(m, random_conformal_factor(m, 5), {}, false);
    CHECK(r.Einv < 1e-6);
    CHECK(r.Wb < 1e-5);
    REQUIRE(r.betaB.has_value());
    CHECK(*r.betaB < 1e-5);
  }
  SUBCASE("bump collar") {
    Model m = catalog_model("bump(0.05, 1)");
    auto r = invariance_residuals(m, random_conformal_factor(m, 6), {}, false);
    CHECK(std::abs(r.before.Wb) > 1.0);
    CHECK(r.Wb < 1e-5);
    CHECK(r.Einv < 1e-5);
  }
  SUBCASE("constant factor on the flat ball") {
    Model m = catalog_model("flat-ball");
    auto r = invariance_residuals(m, Expr(0.7), {}, true);
    CHECK(r.Wb < 1e-13);
    CHECK(r.Einv < 1e-8);
    CHECK(r.pointwise.scalar < 1e-12);
  }
}

TEST_CASE("Nelder-Mead finds the minimum of a quadratic") {
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 0.5) * (x[1] + 0.5) + x[0] * x[1] + 2.0;
  };
  OptimizerConfig cfg;
  cfg.tol = 1e-14;
  cfg.maxIter = 2000;
  SimplexResult a = nelder_mead(f, {0.0, 0.0}, cfg);
  SimplexResult b = nelder_mead(f, {0.0, 0.0}, cfg);
  CHECK(a.converged);
  CHECK(a.x == b.x);
  CHECK(a.x[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-5));
  CHECK(a.x[1] == doctest::Approx(-2.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("Yamabe estimates") {
  SUBCASE("empty basis returns F_b") {
    Model m = catalog_model("cap(1)");
    YamabeEstimate e = yamabe_estimate(m, {});
    CHECK(e.value == invariants_report(m).Fb);
    CHECK(e.converged);
  }
  SUBCASE("hemisphere is already optimal") {
    Model m = catalog_model("hemisphere");
    YamabeEstimate e = yamabe_estimate(m, default_yamabe_basis(m, 4));
    CHECK(e.value == doctest::Approx(kYamabeHemisphere).epsilon(1e-4));
    CHECK(e.value <= e.start + 1e-9);
    double grad_bound = 0.0;
    for (std::size_t k = 0; k < e.coefficients.size(); ++k) {
      grad_bound += std::abs(e.coefficients[k]) * 2.0 * (k + 1) / (pi / 2);
    }
    CHECK(grad_bound < 1e-3);
  }
  SUBCASE("flat ball descends to the hemisphere value") {
    Model m = catalog_model("flat-ball");
    YamabeEstimate e = yamabe_estimate(m, default_yamabe_basis(m, 4));
    CHECK(e.start == doctest::Approx(12.0 * std::sqrt(2.0) * pi).epsilon(1e-10));
    CHECK(e.value <= e.start + 1e-9);
    CHECK(e.value >= kYamabeHemisphere - 1e-3);
    CHECK(e.value <= kYamabeHemisphere + 1e-3);
  }
  SUBCASE("basis size is limited") {
    Model m = catalog_model("flat-ball");
    CHECK_THROWS_AS(yamabe_estimate(m, default_yamabe_basis(m, 33)), std::invalid_argument);
  }
}
