#include "confbound/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace confbound {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::string render(const Report::Value& v, bool quote_strings) {
  struct Visitor {
    bool quote;
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const {
      if (quote) return nlohmann::json(s).dump();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
  };
  return std::visit(Visitor{quote_strings}, v);
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Report::set(const std::string& key, const Eigen::Matrix3d& m) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) set(key + "." + std::to_string(i) + std::to_string(j), m(i, j));
  }
}

void Report::assert_below(const std::string& key, double value, double bound) {
  set(key, value);
  set("bound." + key, bound);
  asserted_.push_back(key);
  if (!(value <= bound)) exceeded_.push_back(key);
}

std::map<std::string, Report::Value> Report::finished() const {
  auto out = fields_;
  std::vector<std::string> a = asserted_, e = exceeded_;
  std::sort(a.begin(), a.end());
  std::sort(e.begin(), e.end());
  out["asserted"] = join(a);
  out["exceeded"] = join(e);
  out["passed"] = e.empty();
  return out;
}

std::string Report::json() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : finished()) {
    out += first ? "\n  " : ",\n  ";
    first = false;
    out += nlohmann::json(k).dump() + ": " + render(v, true);
  }
  return out + "\n}\n";
}

std::string Report::csv() const {
  std::string out = "key,value\n";
  for (const auto& [k, v] : finished()) out += k + "," + render(v, false) + "\n";
  return out;
}

}  // namespace confbound
