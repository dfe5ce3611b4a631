#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vlab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operands living on different grids or with mismatched lengths.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid experiment configuration (unknown key, non-positive size, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulated state became non-finite. Carries the offending path and step.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::size_t path, int step, const std::string& what);
  std::size_t path() const { return path_; }
  int step() const { return step_; }

 private:
  std::size_t path_;
  int step_;
};

/// A deterministic solver (Riccati sweep, regression) failed at a given step.
class SolverError : public std::runtime_error {
 public:
  SolverError(int step, const std::string& what);
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace vlab
