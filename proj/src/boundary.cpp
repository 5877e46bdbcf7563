#include "confbound/boundary.hpp"

#include <cmath>

#include "confbound/quadrature.hpp"

namespace confbound {

std::array<int, 3> tangent_axes(int axis) {
  std::array<int, 3> t{};
  int k = 0;
  for (int a = 0; a < 4; ++a) {
    if (a != axis) t[k++] = a;
  }
  return t;
}

Point face_point(const MetricField& field, const Face& face, const std::array<double, 3>& y) {
  Point x{};
  auto t = tangent_axes(face.axis);
  for (int i = 0; i < 3; ++i) x[t[i]] = y[i];
  x[face.axis] = face.upper ? field.domain().hi[face.axis] : field.domain().lo[face.axis];
  return x;
}

std::vector<Point> face_samples(const MetricField& field, const Face& face, int per_axis) {
  const auto& rule = gauss_legendre(per_axis);
  auto t = tangent_axes(face.axis);
  const Box& box = field.domain();
  std::vector<Point> out;
  for (int i = 0; i < per_axis; ++i) {
    for (int j = 0; j < per_axis; ++j) {
      for (int k = 0; k < per_axis; ++k) {
        std::array<double, 3> y;
        int idx[3] = {i, j, k};
        for (int m = 0; m < 3; ++m) {
          double lo = box.lo[t[m]], hi = box.hi[t[m]];
          y[m] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[idx[m]];
        }
        out.push_back(face_point(field, face, y));
      }
    }
  }
  return out;
}

namespace {

// Frame data at a face point, in double precision.
struct Frame {
  std::array<int, 3> t{};
  Eigen::Vector4d nu = Eigen::Vector4d::Zero();  // outward, contravariant
  Eigen::Vector4d n = Eigen::Vector4d::Zero();   // inward
  Mat3 h, hinv, L;
  double H = 0.0;
};

template <int N>
Frame make_frame(const Curvature<N>& c, const Face& face) {
  Frame f;
  f.t = tangent_axes(face.axis);
  const int a0 = face.axis;
  const double s = face.upper ? 1.0 : -1.0;
  const double gaa = c.ginv(a0, a0).value();
  if (!(gaa > 0.0)) throw DegenerateBoundaryMetric("normal direction is degenerate");
  const double inv_sqrt = 1.0 / std::sqrt(gaa);
  for (int a = 0; a < 4; ++a) f.nu(a) = s * c.ginv(a, a0).value() * inv_sqrt;
  f.n = -f.nu;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      f.h(i, j) = c.g(f.t[i], f.t[j]).value();
      f.L(i, j) = -s * c.gamma(a0, f.t[i], f.t[j]).value() * inv_sqrt;
    }
  }
  Eigen::LLT<Mat3> llt(f.h);
  if (llt.info() != Eigen::Success) throw DegenerateBoundaryMetric("induced boundary metric is not positive definite");
  f.hinv = f.h.inverse();
  f.H = (f.hinv * f.L).trace();
  return f;
}

// T(v, e_i, w, e_j) for a covariant 4-tensor.
template <class Get>
Mat3 contract_0i0j(Get&& get, const Eigen::Vector4d& v, const std::array<int, 3>& t) {
  Mat3 out = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        if (v(a) == 0.0) continue;
        for (int b = 0; b < 4; ++b) acc += v(a) * v(b) * get(a, t[i], b, t[j]);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

template <int N>
Mat3 s_tensor(const Curvature<N>& c, const Frame& f) {
  auto dW = c.covariant(c.weyl_tensor(), 4);  // [e][a][b][c][d]
  const auto& t = f.t;
  const Eigen::Vector4d& n = f.n;
  // divW_{bcd} = g^{ae} D_e W_{abcd}, needed with b tangential, c along n.
  auto divW = [&](int b, int cc, int d) {
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      for (int e = 0; e < 4; ++e) acc += c.ginv(a, e).value() * dW[ix(e, a, b, cc, d)].value();
    }
    return acc;
  };
  Mat3 S = Mat3::Zero();
  // With the normal slots along n, the mean-curvature term takes the outward
  // H; this is the sign for which S_{e^{2w}g} = e^{-w} S_g.
  const double Hn = f.H;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int cc = 0; cc < 4; ++cc) {
        if (n(cc) == 0.0) continue;
        v += n(cc) * (divW(t[i], cc, t[j]) + divW(t[j], cc, t[i]));
      }
      double dn = 0.0, w = 0.0;
      for (int e = 0; e < 4; ++e) {
        for (int b = 0; b < 4; ++b) {
          for (int cc = 0; cc < 4; ++cc) {
            double coef = n(b) * n(cc);
            if (coef == 0.0) continue;
            dn += n(e) * coef * dW[ix(e, b, t[i], cc, t[j])].value();
            if (e == 0) w += coef * c.weyl(b, t[i], cc, t[j]).value();
          }
        }
      }
      S(i, j) = v - dn + (4.0 / 3.0) * Hn * w;
    }
  }
  return S;
}

template <int N>
BoundaryGeometry geometry_from(const Curvature<N>& c, const Face& face, const Frame& f, bool with_s) {
  BoundaryGeometry out;
  out.h = f.h;
  out.L = f.L;
  out.H = f.H;
  out.umbilicDefect = (f.L - (f.H / 3.0) * f.h).cwiseAbs().maxCoeff();
  out.areaDensity = std::sqrt(f.h.determinant());

  const double R = c.scalar().value();
  double R00 = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) R00 += f.nu(a) * f.nu(b) * c.ric(a, b).value();
  }
  Mat3 K = Mat3::Zero();  // h^{kl} R_{kilj}
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) acc += f.hinv(k, l) * c.riem(f.t[k], f.t[i], f.t[l], f.t[j]).value();
      }
      K(i, j) = acc;
    }
  }
  Mat3 Lup = f.hinv * f.L * f.hinv;
  Mat3 A = f.hinv * f.L;
  const double H = f.H;
  const double normL = (Lup.array() * f.L.array()).sum();
  const double trL3 = (A * A * A).trace();
  const double RkikjL = (K.array() * Lup.array()).sum();
  out.Bintegrand = 0.5 * R * H - R00 * H - RkikjL + H * H * H / 3.0 - H * normL + (2.0 / 3.0) * trL3;

  Mat3 Wnn = contract_0i0j([&](int a, int b, int cc, int d) { return c.weyl(a, b, cc, d).value(); }, f.nu, f.t);
  out.weylNormalL = (Wnn.array() * Lup.array()).sum();

  if (with_s) {
    if (c.order() < 3) throw std::invalid_argument("S-tensor needs order-3 jets");
    out.hasS = true;
    out.S = s_tensor(c, f);
  }
  (void)face;
  return out;
}

}  // namespace

template <int N>
BoundaryGeometry boundary_from(const Curvature<N>& c, const Face& face) {
  Frame f = make_frame(c, face);
  return geometry_from(c, face, f, c.order() >= 3);
}

template BoundaryGeometry boundary_from(const Curvature<2>&, const Face&);
template BoundaryGeometry boundary_from(const Curvature<3>&, const Face&);
template BoundaryGeometry boundary_from(const Curvature<4>&, const Face&);

BoundaryGeometry boundary_geometry(const MetricField& field, const Face& face, const Point& x, bool with_s) {
  if (with_s) {
    Curvature<3> c(metric_jet<3>(field, x, 3));
    return geometry_from(c, face, make_frame(c, face), true);
  }
  Curvature<2> c(metric_jet<2>(field, x, 2));
  return geometry_from(c, face, make_frame(c, face), false);
}

GaussCodazzi gauss_codazzi_residual(const MetricField& field, const Face& face, const Point& x) {
  using J = Jet<3>;
  auto gj = metric_jet<3>(field, x, 3);
  Curvature<3> c(gj);
  Frame f = make_frame(c, face);
  const auto& t = f.t;

  JetMatrix<3> hj;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) hj[i][j] = gj[t[i]][t[j]];
  }
  Curvature<3> sigma(hj, 3, {t[0], t[1], t[2], 0});

  GaussCodazzi out;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 3; ++l) {
          double r = c.riem(t[i], t[k], t[j], t[l]).value() - sigma.riem(i, k, j, l).value() +
                     f.L(i, j) * f.L(k, l) - f.L(i, l) * f.L(j, k);
          out.gauss = std::max(out.gauss, std::abs(r));
        }
      }
    }
  }

  // L as jets along the face, for the intrinsic covariant derivative.
  const int a0 = face.axis;
  const double s = face.upper ? 1.0 : -1.0;
  J inv_sqrt = pow(c.ginv(a0, a0), -0.5);
  std::vector<J> Lj(16, J(0.0, 2));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) Lj[ix(i, j)] = c.gamma(a0, t[i], t[j]) * inv_sqrt * (-s);
  }
  auto dL = sigma.covariant(Lj, 2);  // [i][j][k] = D_i L_jk
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        double rm = 0.0;
        for (int a = 0; a < 4; ++a) rm += c.riem(t[i], t[j], t[k], a).value() * f.nu(a);
        double r = rm - (dL[ix(i, j, k)].value() - dL[ix(j, i, k)].value());
        out.codazzi = std::max(out.codazzi, std::abs(r));
      }
    }
  }
  return out;
}

namespace {

double taylor_sign(const Face& face, int k) { return (face.upper && (k % 2 == 1)) ? -1.0 : 1.0; }

}  // namespace

ExpansionCoefficients expansion_coefficients(const MetricField& field, const Face& face, const Point& x) {
  auto gj = metric_jet<4>(field, x, 4);
  Curvature<4> c(gj);
  Frame f = make_frame(c, face);
  const auto& t = f.t;
  ExpansionCoefficients out;

  for (int k = 0; k <= 4; ++k) {
    std::array<int, 4> alpha{};
    alpha[face.axis] = k;
    double fact = 1.0;
    for (int m = 2; m <= k; ++m) fact *= m;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out.direct[k](i, j) = taylor_sign(face, k) * fact * gj[t[i]][t[j]].coeff(alpha);
    }
  }

  const Eigen::Vector4d& n = f.n;
  auto rm = [&](int a, int b, int cc, int d) { return c.riem(a, b, cc, d).value(); };
  Mat3 rho = contract_0i0j(rm, n, t);
  auto dR = c.covariant(c.riem_tensor(), 4);  // [e][a][b][c][d]
  Mat3 D = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int e = 0; e < 4; ++e) {
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) acc += n(e) * n(a) * n(b) * dR[ix(e, a, t[i], b, t[j])].value();
        }
      }
      D(i, j) = acc;
    }
  }
  std::array<double, 4> nv{n(0), n(1), n(2), n(3)};
  auto ddR = c.covariant_along(dR, 5, nv);  // n^f D_f D_e R_abcd
  Mat3 D2 = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int e = 0; e < 4; ++e) {
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) acc += n(e) * n(a) * n(b) * ddR[ix(e, a, t[i], b, t[j])].value();
        }
      }
      D2(i, j) = acc;
    }
  }
  const Mat3& L = f.L;
  const Mat3& hi = f.hinv;
  out.formula[0] = f.h;
  out.formula[1] = -2.0 * L;
  out.formula[2] = -2.0 * rho + 2.0 * L * hi * L;
  out.formula[3] = -2.0 * D + 4.0 * (L * hi * rho + rho * hi * L);
  out.formula[4] = -2.0 * D2 + 6.0 * (L * hi * D + D * hi * L) + 8.0 * rho * hi * rho - 8.0 * L * hi * rho * hi * L;
  for (int k = 1; k <= 4; ++k) {
    out.discrepancy = std::max(out.discrepancy, (out.direct[k] - out.formula[k]).cwiseAbs().maxCoeff());
  }
  return out;
}

const std::array<const char*, 6>& GeodesicIdentities::names() {
  static const std::array<const char*, 6> n = {"R_j0", "P_j0", "W_ki0j", "S_minus_dP", "S_minus_dW",
                                               "dR_0i0j_minus_2S_minus_g_dP00"};
  return n;
}

GeodesicIdentities geodesic_boundary_identities(const MetricField& field, const Face& face, const Point& x) {
  Curvature<3> c(metric_jet<3>(field, x, 3));
  Frame f = make_frame(c, face);
  const auto& t = f.t;
  const Eigen::Vector4d& n = f.n;
  GeodesicIdentities out;
  out.secondFundamentalNorm = f.L.cwiseAbs().maxCoeff();
  out.totallyGeodesic = out.secondFundamentalNorm <= 1e-8;

  BoundaryGeometry geo = geometry_from(c, face, f, true);
  const Mat3& S = geo.S;

  auto along_n = [&](auto&& get2) {
    std::array<double, 3> v{};
    for (int j = 0; j < 3; ++j) {
      for (int a = 0; a < 4; ++a) v[j] += get2(t[j], a) * n(a);
    }
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
  };
  out.residuals[0] = along_n([&](int a, int b) { return c.ric(a, b).value(); });
  out.residuals[1] = along_n([&](int a, int b) { return c.schouten(a, b).value(); });

  double wki0j = 0.0;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int a = 0; a < 4; ++a) acc += c.weyl(t[k], t[i], a, t[j]).value() * n(a);
        wki0j = std::max(wki0j, std::abs(acc));
      }
    }
  }
  out.residuals[2] = wki0j;

  auto dP = c.covariant(c.schouten_tensor(), 2);  // [e][a][b]
  auto dW = c.covariant(c.weyl_tensor(), 4);
  auto dRm = c.covariant(c.riem_tensor(), 4);
  double dP00 = 0.0;
  for (int e = 0; e < 4; ++e) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) dP00 += n(e) * n(a) * n(b) * dP[ix(e, a, b)].value();
    }
  }
  double r3 = 0.0, r4 = 0.0, r5 = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dPij = 0.0, dWij = 0.0, dRij = 0.0;
      for (int e = 0; e < 4; ++e) {
        dPij += n(e) * dP[ix(e, t[i], t[j])].value();
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            double coef = n(e) * n(a) * n(b);
            if (coef == 0.0) continue;
            dWij += coef * dW[ix(e, a, t[i], b, t[j])].value();
            dRij += coef * dRm[ix(e, a, t[i], b, t[j])].value();
          }
        }
      }
      r3 = std::max(r3, std::abs(S(i, j) - dPij));
      r4 = std::max(r4, std::abs(S(i, j) - dWij));
      r5 = std::max(r5, std::abs(dRij - 2.0 * S(i, j) - f.h(i, j) * dP00));
    }
  }
  out.residuals[3] = r3;
  out.residuals[4] = r4;
  out.residuals[5] = r5;
  return out;
}

H3VersusS h3_vs_S(const MetricField& field, const Face& face, const Point& x) {
  H3VersusS out;
  auto gj = metric_jet<3>(field, x, 3);
  Curvature<3> c(gj);
  Frame f = make_frame(c, face);
  out.totallyGeodesic = f.L.cwiseAbs().maxCoeff() <= 1e-8;
  BoundaryGeometry geo = geometry_from(c, face, f, true);
  out.S = geo.S;
  std::array<int, 4> alpha{};
  alpha[face.axis] = 3;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.h3(i, j) = taylor_sign(face, 3) * 6.0 * gj[f.t[i]][f.t[j]].coeff(alpha);
  }
  out.residual = (out.h3 + 4.0 * out.S).cwiseAbs().maxCoeff();

  double lo = c.scalar().value(), hi = lo;
  for (const Point& p : face_samples(field, face, 4)) {
    double R = curvature_bundle(field, p).scalar;
    lo = std::min(lo, R);
    hi = std::max(hi, R);
  }
  out.scalarSpread = hi - lo;
  out.scalarConstantAlongBoundary = out.scalarSpread < 1e-6;
  double dnR = 0.0;
  for (int a = 0; a < 4; ++a) dnR += f.n(a) * c.d(c.scalar(), a).value();
  out.scalarNormalDerivativeZero = std::abs(dnR) < 1e-6;
  return out;
}

MetricField double_collar(const MetricField& field, double depth) {
  MetricField::Components comp = field.effective_components();
  Expr ar = abs(Expr::var(0));
  for (auto& row : comp) {
    for (auto& e : row) e = e.substitute(0, ar);
  }
  Box box = field.domain();
  box.lo[0] = -depth;
  box.hi[0] = depth;
  return MetricField(comp, box);
}

DoublingReport doubling_report(const MetricField& field, int samples_per_axis) {
  MetricField d = double_collar(field, field.domain().hi[0] - field.domain().lo[0]);
  DoublingReport out;
  Face face{0, false};
  auto pts = face_samples(field, face, samples_per_axis);
  out.samples = static_cast<int>(pts.size());
  for (Point p : pts) {
    p[0] = 0.0;
    Point q = p;
    q[0] = -0.0;
    auto gp = d.jets<4>(p, 4);
    auto gm = d.jets<4>(q, 4);
    for (int k = 1; k <= 4; ++k) {
      std::array<int, 4> alpha{k, 0, 0, 0};
      for (int i = 1; i < 4; ++i) {
        for (int j = 1; j < 4; ++j) {
          out.jump[k - 1] = std::max(out.jump[k - 1], std::abs(gp[i][j].coeff(alpha) - gm[i][j].coeff(alpha)));
        }
      }
    }
  }
  return out;
}

}  // namespace confbound
