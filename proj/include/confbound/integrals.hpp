#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "confbound/boundary.hpp"
#include "confbound/curvature.hpp"
#include "confbound/models.hpp"
#include "confbound/quadrature.hpp"

namespace confbound {

using BulkIntegrand = std::function<double(const CurvatureBundle&, const Point&)>;
using BoundaryIntegrand = std::function<double(const BoundaryGeometry&, const Point&)>;

// Tensor-product Gauss-Legendre quadrature of f * sqrt(det g) over the box.
// Axes the metric does not depend on get a single node. Throws
// NodeEvaluationError naming the node if f or the metric fails there.
double integrate_bulk(const MetricField& field, const BulkIntegrand& f, const QuadratureRule& rule = {});
// Same over a face with sqrt(det h).
double integrate_boundary(const MetricField& field, const Face& face, const BoundaryIntegrand& f,
                          const QuadratureRule& rule = {}, bool with_s = false);

// Several integrands in one pass; out has one slot per integrand.
std::vector<double> integrate_bulk_many(const MetricField& field, int count,
                                        const std::function<void(const CurvatureBundle&, const Point&, double*)>& f,
                                        const QuadratureRule& rule = {});
std::vector<double> integrate_boundary_many(
    const MetricField& field, const Face& face, int count,
    const std::function<void(const BoundaryGeometry&, const Point&, double*)>& f, const QuadratureRule& rule = {},
    bool with_s = false);

struct InvariantReport {
  double weylEnergy = 0.0;
  double sigma2Integral = 0.0;
  double boundaryB = 0.0;
  double Einv = 0.0;
  std::optional<double> betaB;  // empty when Einv <= 0
  double Wb = 0.0;
  double Fb = 0.0;
  double cgbResidual = 0.0;
  double volume = 0.0;
  double boundaryArea = 0.0;
  double scalarIntegral = 0.0;
  double meanCurvatureIntegral = 0.0;
  double weylNormalLIntegral = 0.0;
  int chi = 0;
};

InvariantReport invariants_report(const Model& model, const QuadratureRule& rule = {});
InvariantReport invariants_report(const MetricField& field, const std::vector<Face>& boundary, int chi,
                                  const QuadratureRule& rule = {});

struct TheoremConstants {
  double eps = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
};

struct HypothesisTolerances {
  double umbilic = 1e-6;
  double totallyGeodesic = 1e-6;
  double bach = 1e-6;
  double sTensor = 1e-6;
  double energySlack = 1e-6;  // relative, on E >= 2(1 - eps1) pi^2
  int bulkSamplesPerAxis = 3;
  int boundarySamplesPerAxis = 4;
};

struct Conclusion {
  std::string id;
  std::string statement;
};

struct HypothesisReport {
  InvariantReport invariants;
  // F_b > 0 at the given representative: a necessary-condition surrogate for
  // positive Yamabe type, not a certificate.
  bool yamabePositiveSurrogate = false;
  bool energyPositive = false;
  bool umbilic = false;
  bool totallyGeodesic = false;
  bool bachFlat = false;
  bool sFlat = false;
  bool betaBelow8 = false;
  bool betaBelow4 = false;
  bool betaBelow8Eps2 = false;
  bool energyAboveThreshold = false;
  bool WbBelow4Pi2 = false;
  double umbilicDefect = 0.0;
  double secondFundamentalNorm = 0.0;
  double bachNorm = 0.0;
  double sNorm = 0.0;
  std::vector<Conclusion> conclusions;
};

HypothesisReport hypothesis_report(const Model& model, const QuadratureRule& rule = {},
                                   const TheoremConstants& eps = {}, const HypothesisTolerances& tol = {});

// Interior Gauss-Legendre sample points of the box, per_axis^4 of them.
std::vector<Point> bulk_samples(const Box& box, int per_axis);

}  // namespace confbound
