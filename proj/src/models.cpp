#include "confbound/models.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "confbound/errors.hpp"
#include "json.hpp"

namespace confbound {

using std::numbers::pi;
using Json = nlohmann::json;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::BulkChart:
      return "bulk-chart";
    case ModelKind::Collar:
      return "collar";
    case ModelKind::ConformallyCompact:
      return "conformally-compact";
  }
  return "unknown";
}

namespace {

using Components = MetricField::Components;
using Sym3 = std::array<std::array<Expr, 3>, 3>;

Expr var(int k) {
  static const char* names[] = {"r", "psi", "chi", "phi"};
  return Expr::var(k, names[k]);
}

Components zero_components() {
  Components c;
  for (auto& row : c) {
    for (auto& e : row) e = Expr(0.0);
  }
  return c;
}

// Round metric on S^3 in the (psi, chi, phi) chart.
Sym3 round_s3() {
  Sym3 g;
  for (auto& row : g) {
    for (auto& e : row) e = Expr(0.0);
  }
  Expr s1 = sin(var(1)), s2 = sin(var(2));
  g[0][0] = Expr(1.0);
  g[1][1] = pow(s1, Expr(2.0));
  g[2][2] = pow(s1, Expr(2.0)) * pow(s2, Expr(2.0));
  return g;
}

std::array<Expr, 4> omega() {
  Expr p = var(1), c = var(2), f = var(3);
  return {cos(p), sin(p) * cos(c), sin(p) * sin(c) * cos(f), sin(p) * sin(c) * sin(f)};
}

// dr^2 + factor * (s3 + extra) on the collar chart.
Components collar(const Expr& factor, const Sym3& h) {
  Components c = zero_components();
  c[0][0] = Expr(1.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) c[i + 1][j + 1] = h[i][j].is_zero() ? Expr(0.0) : factor * h[i][j];
  }
  return c;
}

Box collar_box(double depth) { return Box{{0.0, 0.0, 0.0, 0.0}, {depth, pi, pi, 2 * pi}}; }

// Pullback to S^3 of a random symmetric form on R^4 that is invariant under
// rotations of the (X3, X4) plane, so the result does not depend on phi.
Sym3 random_pullback(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a11 = u(rng), a12 = u(rng), a22 = u(rng), b = u(rng);
  Expr p = var(1), c = var(2);
  std::array<Expr, 3> d1{-sin(p), Expr(0.0), Expr(0.0)};
  std::array<Expr, 3> d2{cos(p) * cos(c), -(sin(p) * sin(c)), Expr(0.0)};
  std::array<Expr, 3> ds{cos(p) * sin(c), sin(p) * cos(c), Expr(0.0)};
  Expr sigma = sin(p) * sin(c);
  Sym3 q;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Expr e = Expr(a11) * d1[i] * d1[j] + Expr(a12) * (d1[i] * d2[j] + d2[i] * d1[j]) + Expr(a22) * d2[i] * d2[j] +
               Expr(b) * ds[i] * ds[j];
      if (i == 2 && j == 2) e = e + Expr(b) * pow(sigma, Expr(2.0));
      q[i][j] = e;
    }
  }
  return q;
}

Sym3 add(const Sym3& a, const Sym3& b, const Expr& s) {
  Sym3 out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out[i][j] = b[i][j].is_zero() ? a[i][j] : a[i][j] + s * b[i][j];
  }
  return out;
}

std::vector<Expr> scaled_ball_embedding(const Expr& radius) {
  std::vector<Expr> out;
  for (const Expr& w : omega()) out.push_back(radius * w);
  return out;
}

// (X1, X2, X3^2 + X4^2) for the embedding radius * omega.
std::vector<Expr> ball_invariants(const Expr& radius) {
  Expr p = var(1), c = var(2);
  return {radius * cos(p), radius * sin(p) * cos(c), pow(radius * sin(p) * sin(c), Expr(2.0))};
}

Model flat_ball() {
  Model m;
  m.name = "flat-ball";
  m.kind = ModelKind::Collar;
  m.coords = {"r", "psi", "chi", "phi"};
  Expr f = pow(Expr(1.0) - var(0), Expr(2.0));
  m.field = MetricField(collar(f, round_s3()), collar_box(1.0));
  m.boundary = {Face{0, false}};
  m.chi = 1;
  m.isEinstein = true;
  m.collarDepth = 1.0;
  m.embedding = scaled_ball_embedding(Expr(1.0) - var(0));
  m.invariantFunctions = ball_invariants(Expr(1.0) - var(0));
  return m;
}

Model hemisphere() {
  Model m;
  m.name = "hemisphere";
  m.kind = ModelKind::Collar;
  m.coords = {"r", "psi", "chi", "phi"};
  m.field = MetricField(collar(pow(cos(var(0)), Expr(2.0)), round_s3()), collar_box(pi / 2));
  m.boundary = {Face{0, false}};
  m.chi = 1;
  m.isEinstein = true;
  m.collarDepth = pi / 2;
  m.embedding = scaled_ball_embedding(cos(var(0)));
  m.embedding.push_back(sin(var(0)));
  m.invariantFunctions = ball_invariants(cos(var(0)));
  m.invariantFunctions.push_back(sin(var(0)));
  return m;
}

Model cap(double theta0) {
  if (!(theta0 > 0.0 && theta0 < pi)) throw SchemaError("cap: theta0 must lie in (0, pi)");
  Model m;
  std::ostringstream name;
  name << "cap(" << theta0 << ")";
  m.name = name.str();
  m.kind = ModelKind::Collar;
  m.coords = {"r", "psi", "chi", "phi"};
  Expr s = sin(Expr(theta0) - var(0));
  m.field = MetricField(collar(pow(s, Expr(2.0)), round_s3()), collar_box(theta0));
  m.boundary = {Face{0, false}};
  m.chi = 1;
  m.isEinstein = true;
  m.collarDepth = theta0;
  m.embedding = scaled_ball_embedding(s);
  m.embedding.push_back(cos(Expr(theta0) - var(0)));
  m.invariantFunctions = ball_invariants(s);
  m.invariantFunctions.push_back(cos(Expr(theta0) - var(0)));
  return m;
}

Model round_s4() {
  Model m;
  m.name = "round-s4";
  m.kind = ModelKind::BulkChart;
  m.coords = {"theta", "psi", "chi", "phi"};
  Expr s = sin(Expr::var(0, "theta"));
  Components c = collar(pow(s, Expr(2.0)), round_s3());
  m.field = MetricField(c, collar_box(pi));
  m.chi = 2;
  m.isEinstein = true;
  m.embedding = scaled_ball_embedding(s);
  m.embedding.push_back(cos(Expr::var(0, "theta")));
  m.invariantFunctions = ball_invariants(s);
  m.invariantFunctions.push_back(cos(Expr::var(0, "theta")));
  return m;
}

Model s2xs2() {
  Model m;
  m.name = "s2xs2";
  m.kind = ModelKind::BulkChart;
  m.coords = {"x0", "x1", "x2", "x3"};
  Components c = zero_components();
  Expr x0 = Expr::var(0), x1 = Expr::var(1), x2 = Expr::var(2), x3 = Expr::var(3);
  c[0][0] = Expr(1.0);
  c[1][1] = pow(sin(x0), Expr(2.0));
  c[2][2] = Expr(1.0);
  c[3][3] = pow(sin(x2), Expr(2.0));
  m.field = MetricField(c, Box{{0, 0, 0, 0}, {pi, 2 * pi, pi, 2 * pi}});
  m.chi = 4;
  m.isEinstein = true;
  m.embedding = {sin(x0) * cos(x1), sin(x0) * sin(x1), cos(x0), sin(x2) * cos(x3), sin(x2) * sin(x3), cos(x2)};
  m.invariantFunctions = {sin(x0) * cos(x1), sin(x0) * sin(x1), cos(x0), cos(x2)};
  return m;
}

Model hyperbolic_ball() {
  Model m;
  m.name = "hyperbolic-ball";
  m.kind = ModelKind::ConformallyCompact;
  m.coords = {"r", "psi", "chi", "phi"};
  // Geodesic compactification dr^2 + (1 - r^2/4)^2 g_S3; r = 2 is the centre.
  Expr f = pow(Expr(1.0) - pow(var(0), Expr(2.0)) / Expr(4.0), Expr(2.0));
  m.field = MetricField(collar(f, round_s3()), collar_box(2.0));
  m.boundary = {Face{0, false}};
  m.chi = 1;
  m.collarDepth = 2.0;
  // Ball-model radius s = (2 - r) / (2 + r).
  m.embedding = scaled_ball_embedding((Expr(2.0) - var(0)) / (Expr(2.0) + var(0)));
  m.invariantFunctions = ball_invariants((Expr(2.0) - var(0)) / (Expr(2.0) + var(0)));

  ConformallyCompactData cc;
  Expr s = Expr::var(0, "s");
  Expr conf = Expr(4.0) / pow(Expr(1.0) - pow(s, Expr(2.0)), Expr(2.0));
  Components gp = zero_components();
  Sym3 h = round_s3();
  gp[0][0] = conf;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      if (!h[i][j].is_zero()) gp[i + 1][j + 1] = conf * pow(s, Expr(2.0)) * h[i][j];
    }
  }
  cc.gPlus = gp;
  cc.chart = collar_box(1.0);
  cc.face = Face{0, true};
  cc.rho = Expr(1.0) - pow(s, Expr(2.0));
  cc.geodesicR = Expr(2.0) * (Expr(1.0) - s) / (Expr(1.0) + s);
  cc.isEinstein = true;
  cc.epsWindowA = {2e-4, 1.75e-4, 1.5e-4, 1.25e-4};
  cc.epsWindowB = {1.2e-4, 1.15e-4, 1.1e-4, 1e-4};
  cc.fgDepth = 0.1;
  m.cc = cc;
  return m;
}

Model even_collar(unsigned seed) {
  std::mt19937_64 rng(seed);
  Sym3 qa = random_pullback(rng), qb = random_pullback(rng);
  Expr r2 = pow(var(0), Expr(2.0));
  Sym3 h = add(add(round_s3(), qa, r2), qb, pow(var(0), Expr(4.0)));
  Model m;
  m.name = "even-collar(" + std::to_string(seed) + ")";
  m.kind = ModelKind::Collar;
  m.coords = {"r", "psi", "chi", "phi"};
  m.field = MetricField(collar(Expr(1.0), h), collar_box(0.2));
  m.boundary = {Face{0, false}, Face{0, true}};
  m.chi = 0;
  m.collarDepth = 0.2;
  m.embedding = scaled_ball_embedding(Expr(1.0));
  m.embedding.push_back(var(0));
  m.invariantFunctions = ball_invariants(Expr(1.0));
  m.invariantFunctions.push_back(var(0));
  return m;
}

Model cylinder_collar() {
  Model m;
  m.name = "cylinder-collar";
  m.kind = ModelKind::Collar;
  m.coords = {"r", "psi", "chi", "phi"};
  m.field = MetricField(collar(Expr(1.0), round_s3()), collar_box(1.0));
  m.boundary = {Face{0, false}, Face{0, true}};
  m.chi = 0;
  m.collarDepth = 1.0;
  m.embedding = scaled_ball_embedding(Expr(1.0));
  m.embedding.push_back(var(0));
  m.invariantFunctions = ball_invariants(Expr(1.0));
  m.invariantFunctions.push_back(var(0));
  return m;
}

// "name(a, b)" -> name and numeric arguments.
std::pair<std::string, std::vector<double>> split_call(std::string_view spec) {
  auto open = spec.find('(');
  if (open == std::string_view::npos) return {std::string(spec), {}};
  if (spec.back() != ')') throw SchemaError("malformed model name: " + std::string(spec));
  std::string name(spec.substr(0, open));
  std::string_view inner = spec.substr(open + 1, spec.size() - open - 2);
  std::vector<double> args;
  while (!inner.empty()) {
    auto comma = inner.find(',');
    std::string_view tok = inner.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw SchemaError("bad argument '" + std::string(tok) + "' in model name " + std::string(spec));
    }
    args.push_back(v);
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return {name, args};
}

void expect_args(const std::string& name, const std::vector<double>& args, std::size_t max) {
  if (args.size() > max) throw SchemaError(name + " takes at most " + std::to_string(max) + " arguments");
}

unsigned as_seed(double v) {
  if (v < 0 || v != std::floor(v)) throw SchemaError("seed must be a non-negative integer");
  return static_cast<unsigned>(v);
}

}  // namespace

Model bump_model(double eps, unsigned seed) {
  std::mt19937_64 rng(seed);
  Sym3 q = random_pullback(rng);
  Expr t = Expr(1.0) - var(0);
  Sym3 h = add(round_s3(), q, Expr(eps) * pow(t, Expr(6.0)));
  Model m;
  std::ostringstream name;
  name << "bump(" << eps << ", " << seed << ")";
  m.name = name.str();
  m.kind = ModelKind::Collar;
  m.coords = {"r", "psi", "chi", "phi"};
  m.field = MetricField(collar(pow(t, Expr(2.0)), h), collar_box(1.0));
  m.boundary = {Face{0, false}};
  m.chi = 1;
  m.collarDepth = 1.0;
  m.embedding = scaled_ball_embedding(t);
  m.invariantFunctions = ball_invariants(t);
  return m;
}

std::vector<std::string> catalog_names() {
  return {"flat-ball", "hemisphere", "cap", "round-s4", "s2xs2", "hyperbolic-ball", "bump", "even-collar",
          "cylinder-collar"};
}

Model catalog_model(std::string_view spec) {
  auto [name, args] = split_call(spec);
  if (name == "flat-ball") return expect_args(name, args, 0), flat_ball();
  if (name == "hemisphere") return expect_args(name, args, 0), hemisphere();
  if (name == "round-s4") return expect_args(name, args, 0), round_s4();
  if (name == "s2xs2") return expect_args(name, args, 0), s2xs2();
  if (name == "hyperbolic-ball") return expect_args(name, args, 0), hyperbolic_ball();
  if (name == "cylinder-collar") return expect_args(name, args, 0), cylinder_collar();
  if (name == "cap") {
    expect_args(name, args, 1);
    return cap(args.empty() ? 1.0 : args[0]);
  }
  if (name == "bump") {
    expect_args(name, args, 2);
    double eps = args.empty() ? 1e-2 : args[0];
    return bump_model(eps, args.size() > 1 ? as_seed(args[1]) : 1u);
  }
  if (name == "even-collar") {
    expect_args(name, args, 1);
    return even_collar(args.empty() ? 1u : as_seed(args[0]));
  }
  throw SchemaError("unknown catalog model: " + std::string(spec));
}

namespace {

class Validator {
 public:
  void fail(const std::string& msg) { errors_.push_back(msg); }
  bool ok() const { return errors_.empty(); }
  void raise() const {
    std::string msg = "invalid model file:";
    for (const auto& e : errors_) msg += "\n  " + e;
    throw SchemaError(msg);
  }

 private:
  std::vector<std::string> errors_;
};

std::optional<Expr> parse_component(const Json& v, const std::string& where, const std::array<std::string, 4>& names,
                                    Validator& val) {
  if (v.is_number()) return Expr(v.get<double>());
  if (!v.is_string()) {
    val.fail(where + ": expected an expression string");
    return std::nullopt;
  }
  try {
    return parse(v.get<std::string>(), names);
  } catch (const SyntaxError& e) {
    val.fail(where + ": " + e.what());
  }
  return std::nullopt;
}

// Reads an n x n symmetric array; the upper triangle is authoritative and a
// lower entry, when present, must agree with it.
std::optional<std::vector<std::vector<Expr>>> read_matrix(const Json& doc, const char* key, int n,
                                                          const std::array<std::string, 4>& names, Validator& val) {
  if (!doc.contains(key)) {
    val.fail(std::string("missing '") + key + "'");
    return std::nullopt;
  }
  const Json& m = doc[key];
  if (!m.is_array() || static_cast<int>(m.size()) != n) {
    val.fail(std::string("'") + key + "' must be a " + std::to_string(n) + "x" + std::to_string(n) + " array");
    return std::nullopt;
  }
  std::vector<std::vector<Expr>> out(n, std::vector<Expr>(n));
  bool good = true;
  for (int i = 0; i < n; ++i) {
    if (!m[i].is_array() || static_cast<int>(m[i].size()) != n) {
      val.fail(std::string("'") + key + "' row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
      good = false;
      continue;
    }
    for (int j = i; j < n; ++j) {
      std::string where = std::string(key) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      auto e = parse_component(m[i][j], where, names, val);
      if (e) {
        out[i][j] = *e;
        out[j][i] = *e;
      } else {
        good = false;
      }
    }
  }
  if (!good) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const Json& v = m[i][j];
      if (v.is_null()) continue;
      std::string where = std::string(key) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      auto e = parse_component(v, where, names, val);
      if (e && *e != out[i][j]) {
        val.fail(where + " differs from " + key + "[" + std::to_string(j) + "][" + std::to_string(i) +
                 "] (the metric must be symmetric)");
      }
    }
  }
  return out;
}

std::optional<Face> read_face(const Json& f, const std::string& where, Validator& val) {
  if (!f.is_object() || !f.contains("axis") || !f.contains("side")) {
    val.fail(where + ": expected {\"axis\": 0..3, \"side\": \"lower\"|\"upper\"}");
    return std::nullopt;
  }
  if (!f["axis"].is_number_integer() || f["axis"].get<int>() < 0 || f["axis"].get<int>() > 3) {
    val.fail(where + ".axis must be an integer in 0..3");
    return std::nullopt;
  }
  std::string side = f["side"].is_string() ? f["side"].get<std::string>() : "";
  if (side != "lower" && side != "upper") {
    val.fail(where + ".side must be \"lower\" or \"upper\"");
    return std::nullopt;
  }
  return Face{f["axis"].get<int>(), side == "upper"};
}

std::optional<std::vector<double>> read_eps(const Json& v, const std::string& where, Validator& val) {
  if (!v.is_array() || v.size() < 4) {
    val.fail(where + " must be an array of at least 4 numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number() || !(e.get<double>() > 0.0)) {
      val.fail(where + " entries must be positive numbers");
      return std::nullopt;
    }
    out.push_back(e.get<double>());
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] < out[i - 1])) {
      val.fail(where + " must be strictly decreasing");
      return std::nullopt;
    }
  }
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

}  // namespace

Model parse_model_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("invalid model file:\n  not valid JSON: ") + e.what());
  }
  Validator val;
  if (!doc.is_object()) {
    val.fail("top level must be a JSON object");
    val.raise();
  }
  if (!doc.contains("schemaVersion") || !doc["schemaVersion"].is_number_integer() ||
      doc["schemaVersion"].get<int>() != 1) {
    val.fail("'schemaVersion' must be 1");
  }
  Model m;
  if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty()) {
    val.fail("'name' must be a non-empty string");
  } else {
    m.name = doc["name"].get<std::string>();
  }
  std::string kind = doc.contains("kind") && doc["kind"].is_string() ? doc["kind"].get<std::string>() : "";
  if (kind == "bulk-chart") {
    m.kind = ModelKind::BulkChart;
  } else if (kind == "collar") {
    m.kind = ModelKind::Collar;
  } else if (kind == "conformally-compact") {
    m.kind = ModelKind::ConformallyCompact;
  } else {
    val.fail("'kind' must be one of bulk-chart, collar, conformally-compact");
  }
  if (m.kind == ModelKind::Collar) m.coords = {"r", "x1", "x2", "x3"};
  if (doc.contains("coords")) {
    const Json& c = doc["coords"];
    if (!c.is_array() || c.size() != 4) {
      val.fail("'coords' must be an array of 4 names");
    } else {
      for (int k = 0; k < 4; ++k) {
        std::string s = c[k].is_string() ? c[k].get<std::string>() : "";
        if (!is_identifier(s)) {
          val.fail("coords[" + std::to_string(k) + "] must be an identifier");
        } else {
          m.coords[k] = s;
        }
      }
      for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
          if (m.coords[a] == m.coords[b]) val.fail("coordinate name '" + m.coords[a] + "' is repeated");
        }
      }
    }
  }
  Box box;
  bool box_ok = false;
  if (!doc.contains("domain") || !doc["domain"].is_object()) {
    val.fail("missing 'domain' with 'lo' and 'hi'");
  } else {
    const Json& d = doc["domain"];
    auto read4 = [&](const char* key, Point& out) {
      if (!d.contains(key) || !d[key].is_array() || d[key].size() != 4) {
        val.fail(std::string("domain.") + key + " must be an array of 4 numbers");
        return false;
      }
      for (int k = 0; k < 4; ++k) {
        if (!d[key][k].is_number()) {
          val.fail(std::string("domain.") + key + "[" + std::to_string(k) + "] must be a number");
          return false;
        }
        out[k] = d[key][k].get<double>();
      }
      return true;
    };
    bool a = read4("lo", box.lo), b = read4("hi", box.hi);
    box_ok = a && b;
    if (box_ok) {
      for (int k = 0; k < 4; ++k) {
        if (!(box.lo[k] < box.hi[k])) {
          val.fail("domain: lo[" + std::to_string(k) + "] must be below hi[" + std::to_string(k) + "]");
          box_ok = false;
        }
      }
    }
  }
  if (!doc.contains("chi") || !doc["chi"].is_number_integer()) {
    val.fail("'chi' must be an integer");
  } else {
    m.chi = doc["chi"].get<int>();
  }
  if (doc.contains("isEinstein")) {
    if (doc["isEinstein"].is_boolean()) {
      m.isEinstein = doc["isEinstein"].get<bool>();
    } else {
      val.fail("'isEinstein' must be a boolean");
    }
  }
  if (doc.contains("collarDepth")) {
    if (doc["collarDepth"].is_number() && doc["collarDepth"].get<double>() > 0) {
      m.collarDepth = doc["collarDepth"].get<double>();
    } else {
      val.fail("'collarDepth' must be a positive number");
    }
  }

  Components comp = zero_components();
  bool metric_ok = false;
  if (m.kind == ModelKind::Collar) {
    if (doc.contains("metric")) val.fail("collar models give the 3x3 'h', not 'metric'");
    if (auto h = read_matrix(doc, "h", 3, m.coords, val)) {
      comp[0][0] = Expr(1.0);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) comp[i + 1][j + 1] = (*h)[i][j];
      }
      metric_ok = true;
    }
  } else if (auto g = read_matrix(doc, "metric", 4, m.coords, val)) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) comp[i][j] = (*g)[i][j];
    }
    metric_ok = true;
  }

  if (doc.contains("boundary")) {
    const Json& b = doc["boundary"];
    if (!b.is_array()) {
      val.fail("'boundary' must be an array of faces");
    } else {
      for (std::size_t k = 0; k < b.size(); ++k) {
        if (auto f = read_face(b[k], "boundary[" + std::to_string(k) + "]", val)) m.boundary.push_back(*f);
      }
    }
  } else if (m.kind == ModelKind::Collar) {
    m.boundary = {Face{0, false}};
  }

  if (doc.contains("embedding")) {
    const Json& e = doc["embedding"];
    if (!e.is_array()) {
      val.fail("'embedding' must be an array of expressions");
    } else {
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (auto x = parse_component(e[k], "embedding[" + std::to_string(k) + "]", m.coords, val)) {
          m.embedding.push_back(*x);
        }
      }
    }
  }

  std::optional<Expr> rho;
  if (m.kind == ModelKind::ConformallyCompact) {
    ConformallyCompactData cc;
    if (!doc.contains("rho")) {
      val.fail("conformally-compact models need 'rho'");
    } else {
      rho = parse_component(doc["rho"], "rho", m.coords, val);
    }
    if (doc.contains("definingFunction")) {
      cc.geodesicR = parse_component(doc["definingFunction"], "definingFunction", m.coords, val);
    }
    if (!doc.contains("faceAtInfinity")) {
      val.fail("conformally-compact models need 'faceAtInfinity'");
    } else if (auto f = read_face(doc["faceAtInfinity"], "faceAtInfinity", val)) {
      cc.face = *f;
    }
    if (doc.contains("epsGrid")) {
      if (auto e = read_eps(doc["epsGrid"], "epsGrid", val)) {
        std::size_t half = e->size() / 2;
        cc.epsWindowA.assign(e->begin(), e->begin() + half);
        cc.epsWindowB.assign(e->begin() + half, e->end());
        if (cc.epsWindowA.size() < 2) cc.epsWindowA = *e;
      }
    } else {
      cc.epsWindowA = {2e-4, 1.75e-4, 1.5e-4, 1.25e-4};
      cc.epsWindowB = {1.2e-4, 1.15e-4, 1.1e-4, 1e-4};
    }
    cc.isEinstein = m.isEinstein;
    m.isEinstein = false;
    // "metric" is the compactified metric rho^2 g+, smooth up to the face.
    if (metric_ok && rho) {
      cc.rho = *rho;
      cc.chart = box;
      Expr r2 = pow(*rho, Expr(2.0));
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) cc.gPlus[i][j] = comp[i][j].is_zero() ? Expr(0.0) : comp[i][j] / r2;
      }
      m.boundary = {cc.face};
    }
    m.cc = cc;
  }

  if (!val.ok()) val.raise();
  if (box_ok && metric_ok) m.field = MetricField(comp, box);
  if (m.embedding.empty()) {
    for (int k = 0; k < 4; ++k) m.embedding.push_back(Expr::var(k, m.coords[k]));
  }
  for (const Expr& e : m.embedding) {
    if (!e.depends_on(3)) m.invariantFunctions.push_back(e);
  }
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_json(ss.str());
}

Model resolve_model(const std::string& name_or_path) {
  std::string head = name_or_path.substr(0, name_or_path.find('('));
  for (const auto& n : catalog_names()) {
    if (n == head) return catalog_model(name_or_path);
  }
  return load_model(name_or_path);
}

}  // namespace confbound
