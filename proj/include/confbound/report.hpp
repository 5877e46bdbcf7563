#pragma once

// Flat key/value reports with deterministic JSON and CSV rendering.
//
// Keys are emitted in sorted order; numbers use 17 significant digits and
// non-finite values render as null. Asserted residuals carry a bound; the
// report fails when any of them exceeds it or is not finite.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace confbound {

inline constexpr const char* kVersion = "0.1.0";

class Report {
 public:
  using Value = std::variant<std::monostate, bool, long long, double, std::string>;

  void set(const std::string& key, double v) { fields_[key] = v; }
  void set(const std::string& key, int v) { fields_[key] = static_cast<long long>(v); }
  void set(const std::string& key, bool v) { fields_[key] = v; }
  void set(const std::string& key, const std::string& v) { fields_[key] = v; }
  void set(const std::string& key, const char* v) { fields_[key] = std::string(v); }
  void set_null(const std::string& key) { fields_[key] = std::monostate{}; }
  // Upper triangle as key.ij.
  void set(const std::string& key, const Eigen::Matrix3d& m);

  // Records value under key and its bound under bound.<key>.
  void assert_below(const std::string& key, double value, double bound);

  bool failed() const { return !exceeded_.empty(); }
  const std::vector<std::string>& exceeded() const { return exceeded_; }
  const std::map<std::string, Value>& fields() const { return fields_; }

  // Adds the summary fields (asserted, exceeded, passed) before rendering.
  std::string json() const;
  std::string csv() const;

 private:
  std::map<std::string, Value> finished() const;

  std::map<std::string, Value> fields_;
  std::vector<std::string> asserted_;
  std::vector<std::string> exceeded_;
};

// Shortest form is not used: always 17 significant digits.
std::string format_number(double v);

}  // namespace confbound
