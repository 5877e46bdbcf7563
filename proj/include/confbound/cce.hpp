#pragma once

// Conformally compact models: defining functions, Fefferman-Graham
// coefficients and renormalized volume.
//
// Two metrics are involved. The conformally compact data carries g+ on its
// own chart together with a defining function rho; gbar = rho^2 g+ is smooth
// up to the face at infinity. Volume and FG fits along a closed-form
// geodesic defining function use the model's field, which must then be a
// geodesic collar dr^2 + h_r with r the distance coordinate of its face.

#include <optional>
#include <vector>

#include "confbound/boundary.hpp"
#include "confbound/integrals.hpp"
#include "confbound/models.hpp"

namespace confbound {

// Throws NotConformallyCompact unless the model carries conformally compact
// data with rho > 0 inside, rho = 0 on the face, rho^2 g+ extending to the
// face (values at offsets 1e-6 and 1e-7 agree to 1e-3 relative and are
// positive definite) and |d rho|_{rho^2 g+} -> 1 there.
void validate_conformally_compact(const Model& model);

// rho^2 g+ on the chart of the conformally compact data.
MetricField compactified_metric(const ConformallyCompactData& cc);

// sup |Ric(g+) + 3 g+| at interior Gauss points of the chart.
double einstein_residual(const Model& model, int per_axis = 3);

struct DefiningFunctionCheck {
  double residual = 0.0;  // sup | |dr|^2_{r^2 g+} - 1 |
  bool geodesic = false;  // residual < 1e-6
};
// Samples a layer of points within `depth` of the face at infinity.
DefiningFunctionCheck defining_function_check(const Model& model, const Expr& r, double depth = 0.1,
                                              int per_axis = 3);

struct GeodesicOptions {
  double depth = 0.1;        // largest r reached
  int startHalvings = 20;    // trajectories start at r = depth * 2^-startHalvings
  int stepsPerHalving = 32;  // RK4 steps per halving of r
  bool richardson = true;    // combine with a run at twice the steps
  int samplesPerAxis = 2;    // boundary sample grid
  bool withMetric = true;    // also compute h_r by differentiating across trajectories
  double stencil = 1e-3;     // step of the fourth-order difference in y
};

struct GeodesicTrajectory {
  std::array<double, 3> y{};  // tangential coordinates of the starting face point
  std::vector<double> r;      // r = depth * 2^-k, k = 0..6
  std::vector<Point> x;       // chart points at those r
  std::vector<Mat3> h;        // r^2 g+ restricted to {r = const}, in y coordinates
  double constraint = 0.0;    // sup | |dr|^2 - 1 | along the trajectory
  std::optional<double> analyticResidual;  // sup |r_closed_form(x) - r|
};

struct GeodesicReport {
  std::vector<GeodesicTrajectory> trajectories;
  double constraint = 0.0;
  std::optional<double> analyticResidual;
};

// Integrates the characteristics of |dr|^2_{r^2 g+} = 1 inward from a grid of
// face points. The boundary representative is e^{2 omega} times that of the
// closed-form geodesic defining function when one is registered, else of
// rho^2 g+; omega depends on the tangential coordinates only. Throws
// OdeDivergence if a trajectory leaves the chart.
GeodesicReport geodesic_defining_function(const Model& model, const Expr& omega = Expr(0.0),
                                          const GeodesicOptions& opt = {});

struct FGSample {
  std::array<double, 3> y{};
  Mat3 h, g1, g2, g3, g4;
  double fitResidual = 0.0;
};

struct FGExpansion {
  std::vector<FGSample> samples;
  double maxG1 = 0.0;  // sup |g1|; vanishes for any compactification
  double maxG3 = 0.0;
  double fitResidual = 0.0;
};

// Degree-4 least squares in r over r = depth * 2^-k, k = 0..6, per component.
FGSample fit_fg(const std::array<double, 3>& y, const std::vector<double>& r, const std::vector<Mat3>& h);

// Along the model's geodesic collar field.
FGExpansion fg_coefficients(const Model& model, int samples_per_axis = 2);
// Along numerically integrated trajectories.
FGExpansion fg_coefficients(const GeodesicReport& report);

// sup |g2 + P(h)| with P the Schouten tensor of h; zero for Einstein g+.
double fg_schouten_residual(const Model& model, const FGExpansion& fg);

struct VolumeFit {
  std::vector<double> eps;
  std::vector<double> volume;  // Vol_{g+}({r > eps})
  double c0 = 0.0;
  double c2 = 0.0;
  double V = 0.0;
  double fitResidual = 0.0;      // max |fit - volume| / max |volume|
  double diagnosticCm2 = 0.0;    // eps^-2 coefficient when added to the basis
};

// Requires the model's field to be a geodesic collar; eps strictly
// decreasing, at least 4 values, below the collar depth.
VolumeFit renormalized_volume(const Model& model, const std::vector<double>& eps, const QuadratureRule& rule = {});

struct CceReport {
  InvariantReport invariants;
  FGExpansion fg;
  VolumeFit windowA, windowB;
  double V = 0.0;
  double windowSpread = 0.0;  // |V_A - V_B| / |V|
  bool isEinstein = false;
  // Relative residuals; empty when gated off by isEinstein.
  std::optional<double> anderson;       // |8 pi^2 chi - int |W|^2 - 6V| / 8 pi^2
  std::optional<double> energyVolume;   // |E - 3V/2| / (3V/2)
  std::optional<double> sVersusG3;      // sup |S + 3/2 g3|
  std::optional<double> einstein;       // sup |Ric(g+) + 3 g+|
  double schouten = 0.0;                // sup |g2 + P(h)|
  double weylRoutes = 0.0;              // |int |W|^2 on gbar - on g+|
  double maxS = 0.0;
};

CceReport cce_consistency_report(const Model& model, const QuadratureRule& rule = {});

}  // namespace confbound
