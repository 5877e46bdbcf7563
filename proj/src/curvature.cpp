#include "confbound/curvature.hpp"

#include <algorithm>

namespace confbound {

namespace {

// Iterates over all multi-indices of the given rank with digits < n,
// passing the flat index and the digits.
template <class F>
void for_each_index(int rank, int n, F&& f) {
  std::array<int, 8> dig{};
  const int total = pow4(rank);
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    bool ok = true;
    for (int p = rank - 1; p >= 0; --p) {
      dig[p] = rem % 4;
      rem /= 4;
      if (dig[p] >= n) ok = false;
    }
    if (ok) f(flat, dig);
  }
}

}  // namespace

template <int N>
Curvature<N>::Curvature(const JetMatrix<N>& gm, int dim, std::array<int, 4> slot)
    : n_(dim), slot_(slot) {
  const int n = n_;
  order_ = N;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) order_ = std::min(order_, gm[a][b].order());
  }
  if (order_ < 2) throw std::invalid_argument("curvature needs metric jets of order >= 2");
  const J zero(0.0, order_);
  g_.assign(16, zero);
  ginv_.assign(16, zero);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) g_[ix(a, b)] = gm[a][b].truncated(order_);
  }

  // Inverse by a Neumann series around the inverse of the value matrix.
  Eigen::MatrixXd g0(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) g0(a, b) = g_[ix(a, b)].value();
  }
  Eigen::MatrixXd g0i = g0.inverse();
  T m(16, zero);  // -D g0^{-1}
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      J acc = zero;
      for (int c = 0; c < n; ++c) {
        J dac = g_[ix(a, c)];
        dac.coeff(0) = 0.0;
        acc -= dac * g0i(c, b);
      }
      m[ix(a, b)] = acc;
    }
  }
  T power(16, zero);
  for (int a = 0; a < n; ++a) power[ix(a, a)] = J(1.0, order_);
  T sum = power;
  for (int k = 1; k <= order_; ++k) {
    T next(16, zero);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        J acc = zero;
        for (int c = 0; c < n; ++c) acc += power[ix(a, c)] * m[ix(c, b)];
        next[ix(a, b)] = acc;
      }
    }
    power.swap(next);
    for (int i = 0; i < 16; ++i) sum[i] += power[i];
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      J acc = zero;
      for (int c = 0; c < n; ++c) acc += sum[ix(c, b)] * g0i(a, c);
      ginv_[ix(a, b)] = acc;
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < a; ++b) {
      J s = (ginv_[ix(a, b)] + ginv_[ix(b, a)]) * 0.5;
      ginv_[ix(a, b)] = s;
      ginv_[ix(b, a)] = s;
    }
  }

  // Christoffel symbols.
  const J zero1(0.0, order_ - 1);
  T dg(64, zero1);  // dg[ix(c,a,b)] = d_c g_ab
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        dg[ix(c, a, b)] = d(g_[ix(a, b)], c);
        dg[ix(c, b, a)] = dg[ix(c, a, b)];
      }
    }
  }
  T first(64, zero1);  // Gamma_{c,ab}
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        J v = (dg[ix(a, b, c)] + dg[ix(b, a, c)] - dg[ix(c, a, b)]) * 0.5;
        first[ix(c, a, b)] = v;
        first[ix(c, b, a)] = v;
      }
    }
  }
  gamma_.assign(64, zero1);
  for (int e = 0; e < n; ++e) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        J acc = zero1;
        for (int c = 0; c < n; ++c) acc += ginv_[ix(e, c)] * first[ix(c, a, b)];
        gamma_[ix(e, a, b)] = acc;
        gamma_[ix(e, b, a)] = acc;
      }
    }
  }

  // Riemann tensor, Ricci and scalar curvature.
  const J zero2(0.0, order_ - 2);
  T rup(256, zero2);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
          J v = d(gamma_[ix(r, nu, s)], mu) - d(gamma_[ix(r, mu, s)], nu);
          for (int l = 0; l < n; ++l) {
            v += gamma_[ix(r, mu, l)] * gamma_[ix(l, nu, s)] - gamma_[ix(r, nu, l)] * gamma_[ix(l, mu, s)];
          }
          rup[ix(r, s, mu, nu)] = v;
          rup[ix(r, s, nu, mu)] = -v;
        }
      }
    }
  }
  riem_.assign(256, zero2);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
          J acc = zero2;
          for (int l = 0; l < n; ++l) acc += g_[ix(r, l)] * rup[ix(l, s, mu, nu)];
          riem_[ix(r, s, mu, nu)] = acc;
          riem_[ix(r, s, nu, mu)] = -acc;
        }
      }
    }
  }
  ric_.assign(16, zero2);
  for (int s = 0; s < n; ++s) {
    for (int v = s; v < n; ++v) {
      J acc = zero2;
      for (int r = 0; r < n; ++r) acc += rup[ix(r, s, r, v)];
      if (v != s) {
        J other = zero2;
        for (int r = 0; r < n; ++r) other += rup[ix(r, v, r, s)];
        acc = (acc + other) * 0.5;
      }
      ric_[ix(s, v)] = acc;
      ric_[ix(v, s)] = acc;
    }
  }
  scal_ = zero2;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) scal_ += ginv_[ix(a, b)] * ric_[ix(a, b)];
  }

  P_.assign(16, zero2);
  E_.assign(16, zero2);
  const double pn = 1.0 / (2.0 * (n - 1));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      J gr = g_[ix(a, b)] * scal_;
      P_[ix(a, b)] = (ric_[ix(a, b)] - gr * pn) * (1.0 / (n - 2));
      E_[ix(a, b)] = ric_[ix(a, b)] - gr * (1.0 / n);
    }
  }
  W_.assign(256, zero2);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int dd = c + 1; dd < n; ++dd) {
          J v = riem_[ix(a, b, c, dd)] - (g_[ix(a, c)] * P_[ix(b, dd)] + g_[ix(b, dd)] * P_[ix(a, c)] -
                                          g_[ix(a, dd)] * P_[ix(b, c)] - g_[ix(b, c)] * P_[ix(a, dd)]);
          W_[ix(b, a, c, dd)] = -v;
          W_[ix(a, b, dd, c)] = -v;
          W_[ix(b, a, dd, c)] = v;
          W_[ix(a, b, c, dd)] = std::move(v);
        }
      }
    }
  }
}

template <int N>
typename Curvature<N>::T Curvature<N>::covariant(const T& t, int rank) const {
  int ord = 0;
  for_each_index(rank, n_, [&](int flat, const std::array<int, 8>&) { ord = std::max(ord, t[flat].order()); });
  const J zero(0.0, ord > 0 ? ord - 1 : 0);
  T out(pow4(rank + 1), zero);
  const int stride_out = pow4(rank);
  for (int e = 0; e < n_; ++e) {
    for_each_index(rank, n_, [&](int flat, const std::array<int, 8>& a) {
      J v = d(t[flat], e);
      for (int p = 0; p < rank; ++p) {
        const int place = pow4(rank - 1 - p);
        const int base = flat - a[p] * place;
        for (int f = 0; f < n_; ++f) v -= gamma_[ix(f, e, a[p])] * t[base + f * place];
      }
      out[e * stride_out + flat] = v;
    });
  }
  return out;
}

template <int N>
typename Curvature<N>::T Curvature<N>::covariant_along(const T& t, int rank,
                                                       const std::array<double, 4>& v) const {
  int ord = 0;
  for_each_index(rank, n_, [&](int flat, const std::array<int, 8>&) { ord = std::max(ord, t[flat].order()); });
  const J zero(0.0, ord > 0 ? ord - 1 : 0);
  T out(pow4(rank), zero);
  for_each_index(rank, n_, [&](int flat, const std::array<int, 8>& a) {
    J acc = zero;
    for (int e = 0; e < n_; ++e) {
      if (v[e] == 0.0) continue;
      J term = d(t[flat], e);
      for (int p = 0; p < rank; ++p) {
        const int place = pow4(rank - 1 - p);
        const int base = flat - a[p] * place;
        for (int f = 0; f < n_; ++f) term -= gamma_[ix(f, e, a[p])] * t[base + f * place];
      }
      acc += term * v[e];
    }
    out[flat] = acc;
  });
  return out;
}

template <int N>
typename Curvature<N>::T Curvature<N>::gradient(const J& f) const {
  T out(4, J(0.0, f.order() > 0 ? f.order() - 1 : 0));
  for (int e = 0; e < n_; ++e) out[e] = d(f, e);
  return out;
}

template class Curvature<2>;
template class Curvature<3>;
template class Curvature<4>;

double quarter_norm_sq(const double* t4, const Mat4& ginv, int n) {
  std::array<double, 256> a{}, b{};
  std::copy(t4, t4 + 256, a.begin());
  for (int pos = 0; pos < 4; ++pos) {
    const int place = pow4(3 - pos);
    b.fill(0.0);
    for_each_index(4, n, [&](int flat, const std::array<int, 8>& i) {
      const int base = flat - i[pos] * place;
      double acc = 0.0;
      for (int f = 0; f < n; ++f) acc += ginv(i[pos], f) * a[base + f * place];
      b[flat] = acc;
    });
    a = b;
  }
  double s = 0.0;
  for_each_index(4, n, [&](int flat, const std::array<int, 8>&) { s += t4[flat] * a[flat]; });
  return 0.25 * s;
}

double sigma2(const Mat4& P, const Mat4& ginv, int n) {
  Eigen::MatrixXd A = ginv.topLeftCorner(n, n) * P.topLeftCorner(n, n);
  double tr = A.trace();
  return 0.5 * (tr * tr - (A * A).trace());
}

template <int N>
CurvatureBundle bundle_from(const Curvature<N>& c) {
  CurvatureBundle out;
  const int n = c.dim();
  out.g.setZero();
  out.ginv.setZero();
  out.ricci.setZero();
  out.schouten.setZero();
  out.tracefree_ricci.setZero();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      out.g(a, b) = c.g(a, b).value();
      out.ginv(a, b) = c.ginv(a, b).value();
      out.ricci(a, b) = c.ric(a, b).value();
      out.schouten(a, b) = c.schouten(a, b).value();
      out.tracefree_ricci(a, b) = c.tracefree_ricci(a, b).value();
    }
  }
  for_each_index(3, n, [&](int flat, const std::array<int, 8>& i) {
    out.christoffel[flat] = c.gamma(i[0], i[1], i[2]).value();
  });
  for_each_index(4, n, [&](int flat, const std::array<int, 8>&) {
    out.riemann[flat] = c.riem_tensor()[flat].value();
    out.weyl[flat] = c.weyl_tensor()[flat].value();
  });
  out.scalar = c.scalar().value();
  out.weylNormSq = quarter_norm_sq(out.weyl.data(), out.ginv, n);
  out.sigma2P = sigma2(out.schouten, out.ginv, n);
  return out;
}

template CurvatureBundle bundle_from(const Curvature<2>&);
template CurvatureBundle bundle_from(const Curvature<3>&);
template CurvatureBundle bundle_from(const Curvature<4>&);

CurvatureBundle curvature_bundle(const MetricField& field, const Point& x) {
  return bundle_from(Curvature<2>(metric_jet<2>(field, x, 2)));
}

namespace {

template <int N>
Mat4 raise2(const Curvature<N>& c, const std::vector<Jet<N>>& t) {
  const int n = c.dim();
  Mat4 lo = Mat4::Zero(), gi = Mat4::Zero();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      lo(a, b) = t[ix(a, b)].value();
      gi(a, b) = c.ginv(a, b).value();
    }
  }
  return gi * lo * gi;
}

}  // namespace

template <int N>
Mat4 bach_from(const Curvature<N>& c) {
  if (c.order() < 4) throw std::invalid_argument("Bach tensor needs order-4 metric jets");
  const int n = c.dim();
  auto dW = c.covariant(c.weyl_tensor(), 4);  // [h][a][c][b][d]
  std::vector<Jet<N>> divW(64, Jet<N>(0.0, 1));
  for_each_index(3, n, [&](int flat, const std::array<int, 8>& i) {
    Jet<N> acc(0.0, 1);
    for (int dd = 0; dd < n; ++dd) {
      for (int h = 0; h < n; ++h) acc += c.ginv(dd, h) * dW[ix(h, i[0], i[1], i[2], dd)];
    }
    divW[flat] = acc;
  });
  auto ddW = c.covariant(divW, 3);  // [f][a][c][b]
  Mat4 Pup = raise2(c, c.schouten_tensor());
  Mat4 B = Mat4::Zero();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int cc = 0; cc < n; ++cc) {
        for (int f = 0; f < n; ++f) {
          s += c.ginv(cc, f).value() * ddW[ix(f, a, cc, b)].value();
          s += Pup(cc, f) * c.weyl(a, cc, b, f).value();
        }
      }
      B(a, b) = s;
    }
  }
  return B;
}

template Mat4 bach_from(const Curvature<4>&);

Mat4 bach(const MetricField& field, const Point& x) {
  return bach_from(Curvature<4>(metric_jet<4>(field, x, 4)));
}

template <int N>
BachTerms bach_rewritten_from(const Curvature<N>& c) {
  if (c.order() < 4) throw std::invalid_argument("Bach tensor needs order-4 metric jets");
  const int n = c.dim();
  Mat4 g = Mat4::Zero(), gi = Mat4::Zero(), E = Mat4::Zero();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      g(a, b) = c.g(a, b).value();
      gi(a, b) = c.ginv(a, b).value();
      E(a, b) = c.tracefree_ricci(a, b).value();
    }
  }
  const double R = c.scalar().value();
  auto dE = c.covariant(c.tracefree_ricci_tensor(), 2);
  auto ddE = c.covariant(dE, 3);  // [l][k][i][j]
  auto dR = c.gradient(c.scalar());
  auto ddR = c.covariant(dR, 1);  // [i][j]
  Mat4 lapE = Mat4::Zero(), hessR = Mat4::Zero();
  double lapR = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) s += gi(l, k) * ddE[ix(l, k, i, j)].value();
      }
      lapE(i, j) = s;
      hessR(i, j) = 0.5 * (ddR[ix(i, j)].value() + ddR[ix(j, i)].value());
      lapR += gi(i, j) * hessR(i, j);
    }
  }
  Mat4 Eup = gi * E * gi;
  Mat4 EW = Mat4::Zero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) s += Eup(k, l) * c.weyl(i, k, j, l).value();
      }
      EW(i, j) = s;
    }
  }
  Mat4 EE = E * gi * E;
  double normE = (Eup.array() * E.array()).sum();

  BachTerms out;
  out.terms[0] = 0.5 * lapE;
  out.terms[1] = -(1.0 / 6.0) * hessR;
  out.terms[2] = (lapR / 24.0) * g;
  out.terms[3] = EW;
  out.terms[4] = -EE;
  out.terms[5] = (0.25 * normE) * g;
  out.terms[6] = -(R / 6.0) * E;
  out.total = Mat4::Zero();
  for (const auto& t : out.terms) out.total += t;
  return out;
}

template BachTerms bach_rewritten_from(const Curvature<4>&);

BachTerms bach_rewritten(const MetricField& field, const Point& x) {
  return bach_rewritten_from(Curvature<4>(metric_jet<4>(field, x, 4)));
}

}  // namespace confbound
