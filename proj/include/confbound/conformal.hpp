#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "confbound/integrals.hpp"
#include "confbound/models.hpp"

namespace confbound {

// e^{2w} g, composed with any factor already present.
MetricField rescale(const MetricField& field, const Expr& w);
Model rescale(const Model& model, const Expr& w);

// Random smooth conformal factor built from linear and quadratic terms in
// the model's embedding functions. With axisymmetric = true only the
// invariant functions are used, so the rescaled metric keeps the model's
// coordinate symmetry.
Expr random_conformal_factor(const Model& model, unsigned seed, double amplitude = 0.3, bool axisymmetric = true);

struct PointwiseLaws {
  double bach = 0.0;    // max |B_{g_w} - e^{-2w} B_g|
  double sTensor = 0.0;  // max |S_{g_w} - e^{-w} S_g|
  double scalar = 0.0;  // max |R_{g_w} - e^{-2w}(R - 6 Lap w - 6 |dw|^2)|
};
PointwiseLaws pointwise_laws(const Model& model, const Expr& w, int bulk_per_axis = 2, int boundary_per_axis = 3);

struct InvarianceResiduals {
  InvariantReport before;
  InvariantReport after;
  double Wb = 0.0;
  double Einv = 0.0;
  std::optional<double> betaB;  // empty when either side is undefined
  PointwiseLaws pointwise;
};
InvarianceResiduals invariance_residuals(const Model& model, const Expr& w, const QuadratureRule& rule = {},
                                         bool with_pointwise = true);
// Same, reusing a report of the unscaled model computed with the same rule.
InvarianceResiduals invariance_residuals(const Model& model, const Expr& w, const InvariantReport& before,
                                         const QuadratureRule& rule = {}, bool with_pointwise = true);

struct OptimizerConfig {
  int maxIter = 500;
  double scale = 0.1;
  double tol = 1e-8;  // relative spread of simplex values
};

struct YamabeEstimate {
  std::vector<std::string> basis;
  std::vector<double> coefficients;
  double start = 0.0;  // F_b of the model itself
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimizes F_b(e^{2w} g) over w = sum c_k basis_k with a Nelder-Mead
// simplex started at c = 0.
YamabeEstimate yamabe_estimate(const Model& model, const std::vector<Expr>& basis, const OptimizerConfig& cfg = {},
                               const QuadratureRule& rule = {});
// Even powers of (hi - x0) / (hi - lo) in the first chart coordinate.
std::vector<Expr> default_yamabe_basis(const Model& model, int size = 6);

// Deterministic Nelder-Mead minimizer.
struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const OptimizerConfig& cfg);

}  // namespace confbound
