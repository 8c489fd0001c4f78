#pragma once

#include <stdexcept>
#include <string>

namespace sdnr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A switch configuration that does not match the network it is applied to.
class ConfigurationMismatch : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent model configuration (e.g. a bus without a profile).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Graph-level failure: disconnected feeder, islanded bus, wrong loop count.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Power flow failed to converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Operating limit violated while running in reject mode.
class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string constraint, const std::string& what)
      : Error(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// Malformed input document; `where()` is a line:column or JSON-pointer location.
class SchemaError : public Error {
 public:
  SchemaError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// An identifier that does not resolve (dangling bus reference and the like).
class ReferenceError : public Error {
 public:
  using Error::Error;
};

/// Input data that parses but cannot be used (e.g. empty after filtering).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration refused because the tree count exceeds the budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string count, const std::string& what)
      : Error(what), count_(std::move(count)) {}
  /// Matrix-tree count as a decimal string (may exceed 64 bits).
  const std::string& count() const noexcept { return count_; }

 private:
  std::string count_;
};

/// A heuristic could not produce any feasible configuration.
class AlgorithmFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace sdnr
