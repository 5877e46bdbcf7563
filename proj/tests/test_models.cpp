#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "confbound/errors.hpp"
#include "confbound/integrals.hpp"
#include "doctest.h"

using namespace confbound;

namespace {

std::string schema_error(const std::string& text) {
  try {
    parse_model_json(text);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return {};
}

const char* kCollarFile = R"({
  "schemaVersion": 1, "name": "round-cap", "kind": "collar",
  "coords": ["r", "psi", "chi", "phi"],
  "domain": {"lo": [0, 0, 0, 0], "hi": [1.5707963267948966, 3.141592653589793, 3.141592653589793, 6.283185307179586]},
  "h": [["cos(r)^2", 0, 0], [0, "cos(r)^2*sin(psi)^2", 0], [0, 0, "cos(r)^2*sin(psi)^2*sin(chi)^2"]],
  "chi": 1
})";

}  // namespace

TEST_CASE("catalog models") {
  SUBCASE("hemisphere") {
    Model m = catalog_model("hemisphere");
    CHECK(m.kind == ModelKind::Collar);
    CHECK(m.chi == 1);
    REQUIRE(m.boundary.size() == 1);
    CHECK(m.boundary[0].axis == 0);
    const Point x{0.3, 1.1, 0.7, 2.0};
    const double c2 = std::cos(0.3) * std::cos(0.3), s = std::sin(1.1);
    auto g = m.field.value(x);
    CHECK(g(0, 0) == doctest::Approx(1.0));
    CHECK(g(1, 1) == doctest::Approx(c2));
    CHECK(g(2, 2) == doctest::Approx(c2 * s * s));
  }
  SUBCASE("s2xs2") {
    Model m = catalog_model("s2xs2");
    CHECK(m.kind == ModelKind::BulkChart);
    CHECK(m.chi == 4);
    CHECK(m.boundary.empty());
  }
  SUBCASE("hyperbolic ball") {
    Model m = catalog_model("hyperbolic-ball");
    CHECK(m.kind == ModelKind::ConformallyCompact);
    REQUIRE(m.cc.has_value());
    CHECK(m.cc->isEinstein);
    CHECK(m.cc->geodesicR.has_value());
  }
  SUBCASE("every name resolves") {
    for (const std::string& name : catalog_names()) {
      CAPTURE(name);
      CHECK_NOTHROW(catalog_model(name));
      CHECK_NOTHROW(resolve_model(name));
    }
    CHECK_NOTHROW(catalog_model("cap(0.5)"));
    CHECK_NOTHROW(catalog_model("bump(0.01, 3)"));
    CHECK_NOTHROW(catalog_model("even-collar(4)"));
  }
  SUBCASE("bad names") {
    CHECK_THROWS_AS(catalog_model("torus"), SchemaError);
    CHECK_THROWS_AS(catalog_model("cap(4)"), SchemaError);
    CHECK_THROWS_AS(catalog_model("bump(0.1, 1.5)"), SchemaError);
    CHECK_THROWS_AS(catalog_model("flat-ball(1)"), SchemaError);
    CHECK_THROWS_AS(catalog_model("cap(0.5"), SchemaError);
  }
}

TEST_CASE("model files") {
  SUBCASE("collar file matches the catalog hemisphere") {
    Model m = parse_model_json(kCollarFile);
    CHECK(m.kind == ModelKind::Collar);
    CHECK(m.name == "round-cap");
    REQUIRE(m.boundary.size() == 1);
    Model ref = catalog_model("hemisphere");
    for (const Point& x : bulk_samples(m.field.domain(), 2)) {
      CHECK((m.field.value(x) - ref.field.value(x)).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SUBCASE("load from disk") {
    const std::string path = "confbound_test_model.json";
    {
      std::ofstream out(path);
      out << kCollarFile;
    }
    Model m = resolve_model(path);
    CHECK(m.name == "round-cap");
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model("no/such/model.json"), Error);
  }
  SUBCASE("asymmetric metric") {
    std::string msg = schema_error(R"({
      "schemaVersion": 1, "name": "asym", "kind": "bulk-chart",
      "domain": {"lo": [0, 0, 0, 0], "hi": [1, 1, 1, 1]},
      "metric": [[1, "x1", 0, 0], ["x2", 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
      "chi": 1
    })");
    CHECK(msg.find("metric[1][0]") != std::string::npos);
    CHECK(msg.find("symmetric") != std::string::npos);
  }
  SUBCASE("every violation is listed") {
    std::string msg = schema_error(R"({
      "schemaVersion": 2, "kind": "torus",
      "domain": {"lo": [0, 0, 0], "hi": [1, 1, 1, 1]},
      "metric": [[1, 0, 0, 0], [0, "sin(", 0, 0], [0, 0, 1, 0], [0, 0, 0, "y"]],
      "chi": 1.5
    })");
    for (const char* part : {"schemaVersion", "'name'", "'kind'", "domain.lo", "metric[1][1]", "metric[3][3]",
                             "'chi'"}) {
      CAPTURE(part);
      CHECK(msg.find(part) != std::string::npos);
    }
  }
  SUBCASE("malformed JSON") {
    CHECK(schema_error("{\"schemaVersion\": 1,").find("not valid JSON") != std::string::npos);
  }
  SUBCASE("conformally compact files need their data") {
    std::string msg = schema_error(R"({
      "schemaVersion": 1, "name": "cc", "kind": "conformally-compact",
      "domain": {"lo": [0, 0, 0, 0], "hi": [1, 1, 1, 1]},
      "metric": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
      "chi": 1, "epsGrid": [1e-3, 2e-3, 1e-4, 1e-5]
    })");
    CHECK(msg.find("'rho'") != std::string::npos);
    CHECK(msg.find("'faceAtInfinity'") != std::string::npos);
    CHECK(msg.find("epsGrid") != std::string::npos);
  }
}
