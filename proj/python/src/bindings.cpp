#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "confbound/commands.hpp"
#include "confbound/curvature.hpp"
#include "confbound/errors.hpp"
#include "confbound/integrals.hpp"
#include "confbound/models.hpp"

namespace py = pybind11;
using namespace confbound;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Curvature and conformal invariants of four-manifolds with boundary";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("catalog_names", &catalog_names);
  m.def("command_names", &command_names);

  m.def(
      "run_command",
      [](const std::string& name, const std::string& model, int quad_order, double tol, double eps, double eps1,
         double eps2, std::optional<std::string> w, unsigned seed, int basis) {
        CommandOptions opt;
        opt.model = model;
        opt.quadOrder = quad_order;
        opt.tol = tol;
        opt.eps = {eps, eps1, eps2};
        opt.w = std::move(w);
        opt.seed = seed;
        opt.basis = basis;
        Report r = [&] {
          py::gil_scoped_release release;
          return run_command(name, opt);
        }();
        return py::make_tuple(r.json(), r.failed());
      },
      py::arg("name"), py::arg("model"), py::arg("quad_order") = 24, py::arg("tol") = 1e-6, py::arg("eps") = 0.0,
      py::arg("eps1") = 0.0, py::arg("eps2") = 0.0, py::arg("w") = std::nullopt, py::arg("seed") = 1u,
      py::arg("basis") = 4);

  py::class_<Model>(m, "Model")
      .def_readonly("name", &Model::name)
      .def_property_readonly("kind", [](const Model& x) { return to_string(x.kind); })
      .def_readonly("coords", &Model::coords)
      .def_readonly("chi", &Model::chi)
      .def_readonly("is_einstein", &Model::isEinstein)
      .def_property_readonly("domain",
                             [](const Model& x) { return py::make_tuple(x.field.domain().lo, x.field.domain().hi); })
      .def_property_readonly("faces",
                             [](const Model& x) {
                               py::list out;
                               for (const Face& f : x.boundary) out.append(py::make_tuple(f.axis, f.upper));
                               return out;
                             })
      .def("metric", [](const Model& x, const Point& p) { return Eigen::Matrix4d(x.field.value(p)); })
      .def("__repr__", [](const Model& x) { return "<confbound.Model " + x.name + ">"; });

  m.def("load_model", &resolve_model, py::arg("name_or_path"));
  m.def("parse_model_json", &parse_model_json, py::arg("text"));

  py::class_<CurvatureBundle>(m, "Curvature")
      .def_readonly("g", &CurvatureBundle::g)
      .def_readonly("ricci", &CurvatureBundle::ricci)
      .def_readonly("schouten", &CurvatureBundle::schouten)
      .def_readonly("scalar", &CurvatureBundle::scalar)
      .def_readonly("weyl_norm_sq", &CurvatureBundle::weylNormSq)
      .def_readonly("sigma2", &CurvatureBundle::sigma2P);

  m.def(
      "curvature",
      [](const Model& x, const Point& p) { return curvature_bundle(x.field, p); }, py::arg("model"),
      py::arg("point"));
  m.def(
      "bach", [](const Model& x, const Point& p) { return Eigen::Matrix4d(bach(x.field, p)); }, py::arg("model"),
      py::arg("point"));

  py::class_<InvariantReport>(m, "InvariantReport")
      .def_readonly("weyl_energy", &InvariantReport::weylEnergy)
      .def_readonly("sigma2_integral", &InvariantReport::sigma2Integral)
      .def_readonly("boundary_B", &InvariantReport::boundaryB)
      .def_readonly("E", &InvariantReport::Einv)
      .def_readonly("beta_b", &InvariantReport::betaB)
      .def_readonly("W_b", &InvariantReport::Wb)
      .def_readonly("F_b", &InvariantReport::Fb)
      .def_readonly("cgb_residual", &InvariantReport::cgbResidual)
      .def_readonly("volume", &InvariantReport::volume)
      .def_readonly("boundary_area", &InvariantReport::boundaryArea)
      .def_readonly("chi", &InvariantReport::chi);

  m.def(
      "invariants",
      [](const Model& x, int quad_order) {
        py::gil_scoped_release release;
        return invariants_report(x, QuadratureRule{quad_order});
      },
      py::arg("model"), py::arg("quad_order") = 24);
}
