#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace macroml {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV cells, dates, config values).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a data contract (tcodes, coverage, schema).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Value outside the mathematical domain of an operation (log of a non-positive level).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Design matrix with linearly dependent columns. `columns` names the redundant ones.
class CollinearityError : public Error {
 public:
  CollinearityError(const std::string& what, std::vector<std::string> columns)
      : Error(what), columns(std::move(columns)) {}
  std::vector<std::string> columns;
};

/// Iterative solver stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate, double gap)
      : Error(what), last_iterate(std::move(last_iterate)), gap(gap) {}
  std::vector<double> last_iterate;
  double gap;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace macroml
