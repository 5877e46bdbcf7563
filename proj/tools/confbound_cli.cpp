// confbound: reports on curvature, boundary and conformal invariants of
// four-manifolds with boundary.
//
// Exit status: 0 on success, 2 when an asserted residual exceeds its bound,
// 1 on usage, model or IO errors.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "confbound/commands.hpp"
#include "confbound/errors.hpp"

int main(int argc, char** argv) {
  using namespace confbound;
  CLI::App app{"Curvature and conformal invariants of four-manifolds with boundary"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  CommandOptions opt;
  std::string output = "json";
  std::string w;
  double eps = 0.0, eps1 = 0.0, eps2 = 0.0;

  const std::map<std::string, std::string> help = {
      {"invariants", "Integrated invariants: Weyl energy, sigma_2, E, beta_b, W_b, F_b"},
      {"cgb", "Chern-Gauss-Bonnet residual"},
      {"hypotheses", "Theorem hypotheses as predicates, with the conclusions they license"},
      {"expansion", "Collar expansion coefficients h1..h4, Taylor versus curvature formulas"},
      {"double", "Derivative jumps of the doubled metric across the boundary"},
      {"geodesic-id", "Totally geodesic boundary identities and h''' versus S"},
      {"conformal-check", "Conformal invariance of W_b, E, beta_b and the Bach, S and scalar laws"},
      {"yamabe", "Finite-dimensional upper bound for the boundary Yamabe functional"},
      {"renvol", "Renormalized volume fit of a conformally compact model"},
      {"cce-check", "Conformally compact Einstein consistency checks"},
  };
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--model", opt.model, "Catalog name or model file")->required();
    sub->add_option("--quad-order", opt.quadOrder, "Gauss-Legendre points per axis")
        ->capture_default_str()
        ->check(CLI::Range(2, 256));
    sub->add_option("--tol", opt.tol, "Bound for asserted residuals")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--output", output, "Report format")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
    if (name == "hypotheses") {
      sub->add_option("--eps", eps, "Theorem constant eps")->capture_default_str();
      sub->add_option("--eps1", eps1, "Theorem constant eps1")->capture_default_str();
      sub->add_option("--eps2", eps2, "Theorem constant eps2")->capture_default_str();
    }
    if (name == "conformal-check") {
      sub->add_option("--w", w, "Conformal factor expression in the model's coordinates");
      sub->add_option("--seed", opt.seed, "Seed of the random factor used without --w")->capture_default_str();
    }
    if (name == "yamabe") {
      sub->add_option("--basis", opt.basis, "Number of basis functions")->capture_default_str()->check(CLI::Range(0, 32));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  opt.eps = {eps, eps1, eps2};
  if (!w.empty()) opt.w = w;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Report r = run_command(command, opt);
    const std::string text = output == "csv" ? r.csv() : r.json();
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return r.failed() ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "confbound " << command << ": " << e.what() << "\n";
    return 1;
  }
}
