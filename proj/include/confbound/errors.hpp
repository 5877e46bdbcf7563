#pragma once

#include <stdexcept>
#include <string>

namespace confbound {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Raised when an expression primitive is evaluated outside its domain
// (log of a non-positive number, division by zero, ...).
class ExpressionDomainError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class DegenerateBoundaryMetric : public Error {
 public:
  using Error::Error;
};

class NodeEvaluationError : public Error {
 public:
  using Error::Error;
};

class FitIllConditioned : public Error {
 public:
  using Error::Error;
};

class OdeDivergence : public Error {
 public:
  using Error::Error;
};

class NotConformallyCompact : public Error {
 public:
  using Error::Error;
};

}  // namespace confbound
