#pragma once

// Model catalog and model-file loader.
//
// Catalog names: flat-ball, hemisphere, cap(theta0), round-s4, s2xs2,
// hyperbolic-ball, bump(eps, seed), even-collar(seed), cylinder-collar.
// Collar models use coordinates (r, psi, chi, phi) with the round S^3 chart
// dpsi^2 + sin^2 psi dchi^2 + sin^2 psi sin^2 chi dphi^2.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confbound/metric.hpp"

namespace confbound {

enum class ModelKind { BulkChart, Collar, ConformallyCompact };

std::string to_string(ModelKind kind);

// Data of a conformally compact model beyond its compactified metric.
struct ConformallyCompactData {
  MetricField::Components gPlus;  // the complete metric, in the chart below
  Box chart;
  Face face;                       // the face at infinity of `chart`
  Expr rho;                        // defining function on `chart`
  std::optional<Expr> geodesicR;   // analytic geodesic defining function
  bool isEinstein = false;
  std::vector<double> epsWindowA;  // strictly decreasing
  std::vector<double> epsWindowB;
  double fgDepth = 0.1;            // largest r sample of the FG fit
};

struct Model {
  std::string name;
  ModelKind kind = ModelKind::BulkChart;
  std::array<std::string, 4> coords{"x0", "x1", "x2", "x3"};
  // The metric used for curvature and integrals. For conformally compact
  // models this is the compactified metric, in geodesic collar form when an
  // analytic defining function is registered.
  MetricField field;
  std::vector<Face> boundary;
  int chi = 0;
  bool isEinstein = false;
  double collarDepth = 0.2;
  // Cartesian coordinates of an embedding of the model; functions of these
  // are smooth on the manifold, not just on the chart.
  std::vector<Expr> embedding;
  // Smooth functions on the manifold that do not depend on the last chart
  // coordinate (for rescalings that keep the quadrature grid small).
  std::vector<Expr> invariantFunctions;
  std::optional<ConformallyCompactData> cc;
};

// Resolves a catalog name such as "bump(0.01, 3)". Throws SchemaError for
// unknown names or bad arguments.
Model catalog_model(std::string_view spec);
std::vector<std::string> catalog_names();

// Parses and validates a model JSON document; every violation is listed in
// the SchemaError message.
Model parse_model_json(std::string_view text);
Model load_model(const std::string& path);

// A catalog name, or else a path to a model file.
Model resolve_model(const std::string& name_or_path);

// The catalog's bump perturbation of the flat ball, also used by tests as a
// generic non-umbilic collar.
Model bump_model(double eps, unsigned seed);

}  // namespace confbound
