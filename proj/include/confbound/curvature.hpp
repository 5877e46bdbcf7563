#pragma once

// Pointwise curvature from metric jets, in dimension 3 or 4.
//
// Conventions:
//   R^r_{smn} = d_m G^r_{ns} - d_n G^r_{ms} + G^r_{ml} G^l_{ns} - G^r_{nl} G^l_{ms}
//   R_{rsmn}  = g_{rl} R^l_{smn}, so the round sphere has R_{abab} > 0
//   Ric_{sn}  = R^r_{srn},  R = g^{sn} Ric_{sn}
//   P = (Ric - R g / (2(n-1))) / (n-2),  E = Ric - R g / n
//   W = Rm - P (Kulkarni-Nomizu) g,  |W|^2 = W_{abcd} W^{abcd} / 4
// Tensors are stored flat with stride 4 per index; entries with an index
// >= dim are unused.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "confbound/jet.hpp"
#include "confbound/metric.hpp"

namespace confbound {

constexpr int ix(int a, int b) { return a * 4 + b; }
constexpr int ix(int a, int b, int c) { return (a * 4 + b) * 4 + c; }
constexpr int ix(int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; }
constexpr int ix(int a, int b, int c, int d, int e) { return (((a * 4 + b) * 4 + c) * 4 + d) * 4 + e; }

constexpr int pow4(int r) { return r == 0 ? 1 : 4 * pow4(r - 1); }

template <int N>
class Curvature {
 public:
  using J = Jet<N>;
  using T = std::vector<J>;

  // `g` holds the metric jets in its leading dim x dim block; slot[a] is the
  // jet slot that carries the derivative along coordinate a. All jets must
  // have order >= 2.
  Curvature(const JetMatrix<N>& g, int dim, std::array<int, 4> slot);
  // Full four-dimensional chart with the identity slot map.
  explicit Curvature(const JetMatrix<N>& g) : Curvature(g, 4, {0, 1, 2, 3}) {}

  int dim() const { return n_; }
  int order() const { return order_; }
  const J& g(int a, int b) const { return g_[ix(a, b)]; }
  const J& ginv(int a, int b) const { return ginv_[ix(a, b)]; }
  const J& gamma(int c, int a, int b) const { return gamma_[ix(c, a, b)]; }
  const J& riem(int a, int b, int c, int d) const { return riem_[ix(a, b, c, d)]; }
  const J& ric(int a, int b) const { return ric_[ix(a, b)]; }
  const J& scalar() const { return scal_; }
  const J& schouten(int a, int b) const { return P_[ix(a, b)]; }
  const J& tracefree_ricci(int a, int b) const { return E_[ix(a, b)]; }
  const J& weyl(int a, int b, int c, int d) const { return W_[ix(a, b, c, d)]; }

  const T& g_tensor() const { return g_; }
  const T& ginv_tensor() const { return ginv_; }
  const T& riem_tensor() const { return riem_; }
  const T& ric_tensor() const { return ric_; }
  const T& schouten_tensor() const { return P_; }
  const T& tracefree_ricci_tensor() const { return E_; }
  const T& weyl_tensor() const { return W_; }

  // Partial derivative along coordinate a.
  J d(const J& f, int a) const { return f.derivative(slot_[a]); }
  // Covariant derivative of a covariant tensor of the given rank; the new
  // index comes first. The jet order drops by one.
  T covariant(const T& t, int rank) const;
  // v^e D_e t for a constant vector v at the point; same rank as t, order
  // drops by one.
  T covariant_along(const T& t, int rank, const std::array<double, 4>& v) const;
  // Covariant derivative of a scalar.
  T gradient(const J& f) const;

 private:
  int n_;
  int order_;
  std::array<int, 4> slot_;
  T g_, ginv_, gamma_, riem_, ric_, P_, E_, W_;
  J scal_;
};

extern template class Curvature<2>;
extern template class Curvature<3>;
extern template class Curvature<4>;

using Mat4 = Eigen::Matrix4d;

// Double-valued curvature data at one point of a four-dimensional chart.
struct CurvatureBundle {
  Mat4 g, ginv;
  std::array<double, 64> christoffel{};  // Gamma^c_{ab} at ix(c, a, b)
  std::array<double, 256> riemann{};     // R_{abcd}
  Mat4 ricci, schouten, tracefree_ricci;
  double scalar = 0.0;
  std::array<double, 256> weyl{};
  double weylNormSq = 0.0;
  double sigma2P = 0.0;
};

template <int N>
CurvatureBundle bundle_from(const Curvature<N>& c);

CurvatureBundle curvature_bundle(const MetricField& field, const Point& x);

// Quarter of the full contraction of a covariant 4-tensor with itself.
double quarter_norm_sq(const double* t4, const Mat4& ginv, int n);
// sigma_2 of g^{-1} P.
double sigma2(const Mat4& P, const Mat4& ginv, int n);

Mat4 bach(const MetricField& field, const Point& x);
template <int N>
Mat4 bach_from(const Curvature<N>& c);

// The seven summands of the Bach tensor written through the trace-free
// Ricci tensor, in order: Laplacian of E, Hessian of R, Laplacian of R times
// g, E.W, E.E, |E|^2 g, R E.
struct BachTerms {
  std::array<Mat4, 7> terms;
  Mat4 total;
};
BachTerms bach_rewritten(const MetricField& field, const Point& x);
template <int N>
BachTerms bach_rewritten_from(const Curvature<N>& c);

}  // namespace confbound
