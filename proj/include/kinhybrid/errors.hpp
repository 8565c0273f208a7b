#pragma once

#include <stdexcept>
#include <string>

namespace kinhybrid {

/// Invalid problem or solver configuration (bad mesh, bad quadrature level,
/// non-nested grids, malformed input files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (length mismatch, sampling an
/// initial condition that does not exist).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Source iteration hit its cap before the coefficient change dropped below
/// the tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double last_error, int iterations)
      : std::runtime_error(what), last_error_(last_error), iterations_(iterations) {}

  double last_error() const noexcept { return last_error_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_error_;
  int iterations_;
};

/// The reference field of a relative error is identically zero.
class UndefinedReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinhybrid
