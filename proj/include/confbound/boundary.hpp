#pragma once

// Geometry of a boundary face of a coordinate chart.
//
// The face is {x[axis] = const}; the remaining axes are tangential and are
// numbered 0..2 in increasing order. nu is the outward unit normal and
// n = -nu the inward one. L is the second fundamental form with respect to
// nu, L(X, Y) = <D_X nu, Y>, so the unit ball has L = h and H = 3. The
// normal index "0" of the S-tensor and of the totally geodesic identities
// refers to n, the direction of increasing distance from the boundary.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confbound/curvature.hpp"
#include "confbound/metric.hpp"

namespace confbound {

using Mat3 = Eigen::Matrix3d;

struct BoundaryGeometry {
  Mat3 h;                   // induced metric
  Mat3 L;                   // second fundamental form (outward)
  double H = 0.0;           // h^{ij} L_ij
  double umbilicDefect = 0.0;  // max |L - (H/3) h|
  double Bintegrand = 0.0;
  double weylNormalL = 0.0;  // W(e_i, nu, e_j, nu) L^{ij}
  double areaDensity = 0.0;  // sqrt(det h)
  bool hasS = false;
  Mat3 S = Mat3::Zero();
};

std::array<int, 3> tangent_axes(int axis);

// Full four-dimensional point on the face with the given tangential
// coordinates.
Point face_point(const MetricField& field, const Face& face, const std::array<double, 3>& y);

template <int N>
BoundaryGeometry boundary_from(const Curvature<N>& c, const Face& face);

// Needs order-3 jets for S; with with_s = false order 2 suffices.
BoundaryGeometry boundary_geometry(const MetricField& field, const Face& face, const Point& x,
                                   bool with_s = true);

struct GaussCodazzi {
  double gauss = 0.0;    // max |R_ikjl - R^Sigma_ikjl + L_ij L_kl - L_il L_jk|
  double codazzi = 0.0;  // max |R(e_i, e_j, e_k, nu) - (D_i L_jk - D_j L_ik)|
};
GaussCodazzi gauss_codazzi_residual(const MetricField& field, const Face& face, const Point& x);

struct ExpansionCoefficients {
  std::array<Mat3, 5> direct;   // d_r^k h at the face
  std::array<Mat3, 5> formula;  // curvature expressions
  double discrepancy = 0.0;     // max over k = 1..4 and components
};
// Requires the collar form g = dr^2 + h(x, r) near the face.
ExpansionCoefficients expansion_coefficients(const MetricField& field, const Face& face, const Point& x);

struct GeodesicIdentities {
  bool totallyGeodesic = false;
  double secondFundamentalNorm = 0.0;
  // R_j0, P_j0, W_ki0j, S - D^0 P_ij, S - D^0 W_0i0j, D^0 R_0i0j - 2 S - g D^0 P_00
  std::array<double, 6> residuals{};
  static const std::array<const char*, 6>& names();
};
GeodesicIdentities geodesic_boundary_identities(const MetricField& field, const Face& face, const Point& x);

struct H3VersusS {
  double residual = 0.0;  // max |h''' + 4 S|
  bool totallyGeodesic = false;
  bool scalarConstantAlongBoundary = false;
  bool scalarNormalDerivativeZero = false;
  double scalarSpread = 0.0;
  bool valid() const { return totallyGeodesic && scalarConstantAlongBoundary && scalarNormalDerivativeZero; }
  Mat3 h3 = Mat3::Zero();
  Mat3 S = Mat3::Zero();
};
H3VersusS h3_vs_S(const MetricField& field, const Face& face, const Point& x);

struct DoublingReport {
  std::array<double, 4> jump{};  // Taylor-coefficient jumps for k = 1..4
  int samples = 0;
};
// The field must be in collar form on the face x0 = lo[0]. The doubled field
// is h(x, |r|) on r in (-depth, depth).
MetricField double_collar(const MetricField& field, double depth);
DoublingReport doubling_report(const MetricField& field, int samples_per_axis = 4);

// Boundary sample points: Gauss-Legendre nodes of the given order on the face.
std::vector<Point> face_samples(const MetricField& field, const Face& face, int per_axis);

}  // namespace confbound
