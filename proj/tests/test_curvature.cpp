#include <cmath>
#include <numbers>
#include <random>

#include "confbound/curvature.hpp"
#include "doctest.h"

using namespace confbound;
using std::numbers::pi;

namespace {

MetricField diag_metric(const char* g0, const char* g1, const char* g2, const char* g3, Box box) {
  MetricField::Components c;
  for (auto& row : c)
    for (auto& e : row) e = Expr(0.0);
  c[0][0] = parse(g0);
  c[1][1] = parse(g1);
  c[2][2] = parse(g2);
  c[3][3] = parse(g3);
  return MetricField(c, box);
}

MetricField round_s4() {
  return diag_metric("1", "sin(x0)^2", "sin(x0)^2*sin(x1)^2", "sin(x0)^2*sin(x1)^2*sin(x2)^2",
                     Box{{0, 0, 0, 0}, {pi, pi, pi, 2 * pi}});
}

MetricField s2xs2() {
  return diag_metric("1", "sin(x0)^2", "1", "sin(x2)^2", Box{{0, 0, 0, 0}, {pi, 2 * pi, pi, 2 * pi}});
}

MetricField hyperbolic_ball() {
  const char* f = "4/(1 - (x0^2+x1^2+x2^2+x3^2))^2";
  return diag_metric(f, f, f, f, Box{{-0.5, -0.5, -0.5, -0.5}, {0.5, 0.5, 0.5, 0.5}});
}

// A generic non-diagonal metric: delta plus a small smooth perturbation.
MetricField perturbed(double eps) {
  MetricField::Components c;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const char* shapes[] = {"sin(x0 + 2*x1)", "cos(x2 - x3)*x0", "exp(0.3*x1)*sin(x3)", "x0*x1 + x2^2"};
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      Expr q = Expr(0.0);
      for (auto* s : shapes) q = q + Expr(u(rng)) * parse(s);
      c[a][b] = (a == b ? Expr(1.0) : Expr(0.0)) + Expr(eps) * q;
    }
  }
  return MetricField(c, Box{{-1, -1, -1, -1}, {1, 1, 1, 1}});
}

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("flat metric has vanishing curvature") {
  auto f = diag_metric("1", "1", "1", "1", Box{{0, 0, 0, 0}, {1, 1, 1, 1}});
  auto g = metric_jet<4>(f, {0.2, 0.3, 0.4, 0.5}, 4);
  CHECK(g[1][1].value() == 1.0);
  for (int i = 1; i < jet_size(4); ++i) CHECK(g[2][2].coeff(i) == 0.0);
  auto b = curvature_bundle(f, {0.2, 0.3, 0.4, 0.5});
  for (double v : b.christoffel) CHECK(v == 0.0);
  for (double v : b.riemann) CHECK(v == 0.0);
  CHECK(b.sigma2P == 0.0);
  CHECK(max_abs(bach(f, {0.2, 0.3, 0.4, 0.5})) == 0.0);
}

TEST_CASE("round S4 polar chart") {
  auto f = round_s4();
  Point x{0.7, 1.1, 2.0, 0.4};
  auto g = metric_jet<4>(f, x, 4);
  CHECK(g[1][1].partial({1, 0, 0, 0}) == doctest::Approx(2 * std::sin(0.7) * std::cos(0.7)).epsilon(1e-14));
  auto b = curvature_bundle(f, x);
  CHECK(b.scalar == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(max_abs(b.schouten - 0.5 * b.g) < 1e-12);
  CHECK(b.sigma2P == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(b.weylNormSq < 1e-20);
  // Space form: R_abcd = g_ac g_bd - g_ad g_bc.
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int bb = 0; bb < 4; ++bb)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double k = b.g(a, c) * b.g(bb, d) - b.g(a, d) * b.g(bb, c);
          worst = std::max(worst, std::abs(b.riemann[ix(a, bb, c, d)] - k));
        }
  CHECK(worst < 1e-9);
  CHECK(max_abs(bach(f, x)) < 1e-8);
}

TEST_CASE("S2xS2 product") {
  auto f = s2xs2();
  Point x{0.9, 1.0, 2.1, 3.0};
  auto b = curvature_bundle(f, x);
  CHECK(b.scalar == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(max_abs(b.schouten - b.g / 6.0) < 1e-12);
  CHECK(b.sigma2P == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(b.weylNormSq == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(max_abs(bach(f, x)) < 1e-8);
}

TEST_CASE("hyperbolic ball") {
  auto f = hyperbolic_ball();
  auto g = metric_jet<4>(f, {0, 0, 0, 0}, 4);
  CHECK(g[0][0].value() == 4.0);
  CHECK(g[0][0].d(1) == 0.0);
  Point x{0.1, -0.2, 0.3, 0.05};
  auto b = curvature_bundle(f, x);
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int bb = 0; bb < 4; ++bb)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double k = -(b.g(a, c) * b.g(bb, d) - b.g(a, d) * b.g(bb, c));
          worst = std::max(worst, std::abs(b.riemann[ix(a, bb, c, d)] - k));
        }
  CHECK(worst < 1e-9);
  CHECK(max_abs(bach(f, x)) < 1e-8);
}

TEST_CASE("curvature identities on a generic metric") {
  auto f = perturbed(0.05);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int t = 0; t < 20; ++t) {
    Point x{u(rng), u(rng), u(rng), u(rng)};
    Curvature<3> c(metric_jet<3>(f, x, 3));
    auto b = bundle_from(c);
    double sym = 0.0, bianchi = 0.0, wtrace = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int bb = 0; bb < 4; ++bb)
        for (int cc = 0; cc < 4; ++cc)
          for (int d = 0; d < 4; ++d) {
            double r = b.riemann[ix(a, bb, cc, d)];
            sym = std::max({sym, std::abs(r + b.riemann[ix(bb, a, cc, d)]), std::abs(r - b.riemann[ix(cc, d, a, bb)])});
            bianchi = std::max(bianchi, std::abs(r + b.riemann[ix(a, cc, d, bb)] + b.riemann[ix(a, d, bb, cc)]));
          }
    for (int bb = 0; bb < 4; ++bb)
      for (int d = 0; d < 4; ++d) {
        double tr = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int cc = 0; cc < 4; ++cc) tr += b.ginv(a, cc) * b.weyl[ix(a, bb, cc, d)];
        wtrace = std::max(wtrace, std::abs(tr));
      }
    CHECK(sym < 1e-9);
    CHECK(bianchi < 1e-9);
    CHECK(wtrace < 1e-9);
    CHECK((b.ginv * b.schouten).trace() == doctest::Approx(b.scalar / 6.0).epsilon(1e-10));
    // Contracted second Bianchi identity: div(Ric - R g / 2) = 0.
    auto dRic = c.covariant(c.ric_tensor(), 2);
    auto dR = c.gradient(c.scalar());
    for (int bb = 0; bb < 4; ++bb) {
      double s = -0.5 * dR[bb].value();
      for (int a = 0; a < 4; ++a)
        for (int e = 0; e < 4; ++e) s += b.ginv(e, a) * dRic[ix(e, a, bb)].value();
      CHECK(std::abs(s) < 1e-7);
    }
  }
}

TEST_CASE("Bach tensor: two formulas agree on a generic metric") {
  auto f = perturbed(0.05);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int t = 0; t < 10; ++t) {
    Point x{u(rng), u(rng), u(rng), u(rng)};
    Curvature<4> c(metric_jet<4>(f, x, 4));
    Mat4 B = bach_from(c);
    auto R = bach_rewritten_from(c);
    INFO("B=\n", B, "\nrewritten=\n", R.total);
    CHECK(max_abs(B - B.transpose()) < 1e-8);
    Mat4 gi = c.ginv_tensor()[0].value() * Mat4::Zero();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) gi(a, b) = c.ginv(a, b).value();
    CHECK(std::abs((gi * B).trace()) < 1e-8);
    CHECK(max_abs(B) > 1e-6);
    CHECK(max_abs(B - R.total) < 1e-7);
  }
}
