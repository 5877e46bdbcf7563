#pragma once

// The report-producing commands shared by the CLI and the Python module.

#include <optional>
#include <string>
#include <vector>

#include "confbound/integrals.hpp"
#include "confbound/report.hpp"

namespace confbound {

struct CommandOptions {
  std::string model = "hemisphere";  // catalog name or model file path
  int quadOrder = 24;
  double tol = 1e-6;
  TheoremConstants eps;
  std::optional<std::string> w;  // conformal factor; random from seed when empty
  unsigned seed = 1;
  int basis = 4;                 // Yamabe basis size
};

const std::vector<std::string>& command_names();

// Floors under --tol for quantities limited by discretization rather than
// rounding: quadrature-based integrals, the volume fit and the FG fit.
inline constexpr double kQuadratureFloor = 1e-5;
inline constexpr double kVolumeFloor = 1e-3;
inline constexpr double kFitFloor = 1e-4;

// Throws std::invalid_argument for an unknown command; model and numerical
// errors propagate.
Report run_command(const std::string& name, const CommandOptions& opt);

}  // namespace confbound
