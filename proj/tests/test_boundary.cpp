#include <cmath>
#include <numbers>

#include "confbound/boundary.hpp"
#include "confbound/errors.hpp"
#include "confbound/models.hpp"
#include "doctest.h"

using namespace confbound;
using std::numbers::pi;

namespace {

std::vector<Point> lower_face_points(const Model& m) { return face_samples(m.field, Face{0, false}, 3); }

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

// A strongly non-umbilic collar with polynomial normal dependence.
MetricField generic_collar() {
  MetricField::Components c;
  for (auto& row : c)
    for (auto& e : row) e = Expr(0.0);
  c[0][0] = Expr(1.0);
  c[1][1] = parse("1 + 0.8*x0 + 0.3*x0^2*sin(x2) + 0.2*x0^3 - 0.1*x0^4*x3");
  c[2][2] = parse("1 - 0.5*x0 + 0.4*x0^2*cos(x1+x3)");
  c[3][3] = parse("1 + 0.1*x0 + 0.5*x0^2*x1 + 0.3*x0^3*sin(x2)");
  c[1][2] = parse("0.3*x0 + 0.2*x0^2*sin(x3)");
  c[1][3] = parse("-0.2*x0 + 0.3*x0^2*cos(x2)");
  c[2][3] = parse("0.25*x0^2*x2 + 0.1*x0^4");
  return MetricField(c, Box{{0, -1, -1, -1}, {0.2, 1, 1, 1}});
}

}  // namespace

TEST_CASE("flat ball boundary: L = h, H = 3, integrand 2") {
  Model m = catalog_model("flat-ball");
  for (const Point& x : lower_face_points(m)) {
    auto b = boundary_geometry(m.field, Face{0, false}, x);
    CHECK(max_abs(b.L - b.h) < 1e-12);
    CHECK(b.H == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(b.Bintegrand == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.umbilicDefect < 1e-12);
    CHECK(max_abs(b.S) < 1e-10);
  }
}

TEST_CASE("hemisphere boundary is totally geodesic") {
  Model m = catalog_model("hemisphere");
  for (const Point& x : lower_face_points(m)) {
    auto b = boundary_geometry(m.field, Face{0, false}, x);
    CHECK(max_abs(b.L) < 1e-12);
    CHECK(std::abs(b.H) < 1e-12);
    CHECK(std::abs(b.Bintegrand) < 1e-12);
    CHECK(max_abs(b.S) < 1e-10);
  }
}

TEST_CASE("geodesic ball in S^4 has H = 3 cot theta0") {
  for (double t0 : {0.7, 1.2, 2.0}) {
    Model m = catalog_model("cap(" + std::to_string(t0) + ")");
    Point x = face_point(m.field, Face{0, false}, {1.0, 0.8, 2.0});
    auto b = boundary_geometry(m.field, Face{0, false}, x);
    CHECK(b.H == doctest::Approx(3.0 / std::tan(t0)).epsilon(1e-12));
    CHECK(b.umbilicDefect < 1e-12);
  }
}

TEST_CASE("collar expansion: hemisphere and flat ball patterns") {
  Model hemi = catalog_model("hemisphere");
  Model ball = catalog_model("flat-ball");
  for (const Point& x : lower_face_points(hemi)) {
    auto e = expansion_coefficients(hemi.field, Face{0, false}, x);
    const Mat3& h = e.direct[0];
    CHECK(e.discrepancy < 1e-6);
    CHECK(max_abs(e.direct[1]) < 1e-12);
    CHECK(max_abs(e.direct[2] + 2.0 * h) < 1e-12);
    CHECK(max_abs(e.direct[3]) < 1e-12);
    CHECK(max_abs(e.direct[4] - 8.0 * h) < 1e-10);
  }
  for (const Point& x : lower_face_points(ball)) {
    auto e = expansion_coefficients(ball.field, Face{0, false}, x);
    const Mat3& h = e.direct[0];
    CHECK(e.discrepancy < 1e-6);
    CHECK(max_abs(e.direct[1] + 2.0 * h) < 1e-12);
    CHECK(max_abs(e.direct[2] - 2.0 * h) < 1e-12);
    CHECK(max_abs(e.direct[3]) < 1e-12);
    CHECK(max_abs(e.direct[4]) < 1e-12);
  }
}

TEST_CASE("collar expansion formulas hold on non-umbilic collars") {
  MetricField g = generic_collar();
  for (Point x : {Point{0, 0.3, -0.2, 0.5}, Point{0, -0.7, 0.4, 0.1}}) {
    auto e = expansion_coefficients(g, Face{0, false}, x);
    CHECK(e.discrepancy < 1e-9);
    CHECK(max_abs(e.direct[4]) > 0.1);
  }
  Model bump = catalog_model("bump(0.05, 3)");
  for (const Point& x : lower_face_points(bump)) {
    CHECK(expansion_coefficients(bump.field, Face{0, false}, x).discrepancy < 1e-9);
  }
}

TEST_CASE("h1 + 2L = 0 on every catalog collar") {
  for (const char* name : {"flat-ball", "hemisphere", "cap(1.1)", "bump(0.01, 1)", "even-collar(2)",
                           "cylinder-collar", "hyperbolic-ball"}) {
    Model m = catalog_model(name);
    for (const Point& x : lower_face_points(m)) {
      auto e = expansion_coefficients(m.field, Face{0, false}, x);
      auto b = boundary_geometry(m.field, Face{0, false}, x, false);
      CHECK_MESSAGE(max_abs(e.direct[1] + 2.0 * b.L) < 1e-9, name);
    }
  }
}

TEST_CASE("Gauss and Codazzi equations") {
  for (const char* name : {"bump(0.01, 1)", "flat-ball", "cap(0.9)", "even-collar(3)"}) {
    Model m = catalog_model(name);
    for (const Face& f : m.boundary) {
      for (const Point& x : face_samples(m.field, f, 3)) {
        auto r = gauss_codazzi_residual(m.field, f, x);
        CHECK_MESSAGE(r.gauss < 1e-7, name);
        CHECK_MESSAGE(r.codazzi < 1e-7, name);
      }
    }
  }
  MetricField g = generic_collar();
  for (Face f : {Face{0, false}, Face{0, true}}) {
    Point x = face_point(g, f, {0.3, -0.2, 0.5});
    auto r = gauss_codazzi_residual(g, f, x);
    CHECK(r.gauss < 1e-12);
    CHECK(r.codazzi < 1e-12);
  }
}

TEST_CASE("totally geodesic identities") {
  std::vector<Model> models{catalog_model("hemisphere")};
  for (int seed = 1; seed <= 5; ++seed) models.push_back(catalog_model("even-collar(" + std::to_string(seed) + ")"));
  for (const Model& m : models) {
    for (const Point& x : lower_face_points(m)) {
      auto id = geodesic_boundary_identities(m.field, Face{0, false}, x);
      CHECK(id.totallyGeodesic);
      for (int k = 0; k < 6; ++k) CHECK_MESSAGE(id.residuals[k] < 1e-7, m.name << " " << GeodesicIdentities::names()[k]);
    }
  }
  Model ball = catalog_model("flat-ball");
  auto id = geodesic_boundary_identities(ball.field, Face{0, false}, lower_face_points(ball)[0]);
  CHECK_FALSE(id.totallyGeodesic);
}

TEST_CASE("totally geodesic identities with odd normal terms") {
  // h = delta + r^2 A(x) + r^3 B(x): totally geodesic, S != 0.
  MetricField::Components c;
  for (auto& row : c)
    for (auto& e : row) e = Expr(0.0);
  c[0][0] = Expr(1.0);
  c[1][1] = parse("1 + 0.5*x0^2*sin(x2) + 0.7*x0^3*cos(x3)");
  c[2][2] = parse("1 - 0.3*x0^2*x1 + 0.4*x0^3*x1*x2");
  c[3][3] = parse("1 + 0.2*x0^2 - 0.6*x0^3*sin(x1 + x2)");
  c[1][2] = parse("0.3*x0^2*cos(x3) + 0.5*x0^3");
  c[2][3] = parse("0.2*x0^3*x3");
  MetricField g(c, Box{{0, -1, -1, -1}, {0.2, 1, 1, 1}});
  for (Point x : {Point{0, 0.3, -0.2, 0.5}, Point{0, -0.6, 0.1, 0.9}}) {
    auto id = geodesic_boundary_identities(g, Face{0, false}, x);
    CHECK(id.totallyGeodesic);
    for (int k = 0; k < 6; ++k) CHECK_MESSAGE(id.residuals[k] < 1e-10, GeodesicIdentities::names()[k]);
    CHECK(max_abs(boundary_geometry(g, Face{0, false}, x).S) > 1e-2);
  }
}

TEST_CASE("third normal derivative versus S") {
  Model cyl = catalog_model("cylinder-collar");
  for (const Point& x : lower_face_points(cyl)) {
    auto r = h3_vs_S(cyl.field, Face{0, false}, x);
    CHECK(r.valid());
    CHECK(max_abs(r.h3) < 1e-12);
    CHECK(max_abs(r.S) < 1e-12);
    CHECK(r.residual < 1e-12);
  }
  Model hemi = catalog_model("hemisphere");
  auto r = h3_vs_S(hemi.field, Face{0, false}, lower_face_points(hemi)[0]);
  CHECK(r.valid());
  CHECK(r.residual < 1e-10);
  Model even = catalog_model("even-collar(1)");
  auto e = h3_vs_S(even.field, Face{0, false}, lower_face_points(even)[0]);
  CHECK(e.totallyGeodesic);
  CHECK_FALSE(e.scalarConstantAlongBoundary);
  CHECK_FALSE(e.valid());
}

TEST_CASE("doubling jumps") {
  auto ball = doubling_report(catalog_model("flat-ball").field);
  CHECK(ball.jump[0] > 0.1);
  CHECK(ball.jump[1] == 0.0);
  CHECK(ball.jump[3] == 0.0);
  auto hemi = doubling_report(catalog_model("hemisphere").field);
  for (double j : hemi.jump) CHECK(j < 1e-9);
  auto even = doubling_report(catalog_model("even-collar(1)").field);
  CHECK(even.jump[1] == 0.0);
  CHECK(even.jump[3] == 0.0);
  CHECK(even.jump[0] < 1e-12);
  CHECK(even.jump[2] < 1e-12);
  auto bump = doubling_report(catalog_model("bump(0.01, 1)").field);
  CHECK(bump.jump[2] > 1e-3);
}

TEST_CASE("degenerate induced metric is reported") {
  MetricField::Components c;
  for (auto& row : c)
    for (auto& e : row) e = Expr(0.0);
  c[0][0] = Expr(1.0);
  c[1][1] = parse("x0 + 1");
  c[2][2] = Expr(1.0);
  c[3][3] = Expr(1.0);
  MetricField g(c, Box{{-1, 0, 0, 0}, {1, 1, 1, 1}});
  CHECK_THROWS_AS(boundary_geometry(g, Face{0, false}, Point{-1, 0.5, 0.5, 0.5}), NonPositiveDefinite);
}
