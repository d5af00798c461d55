#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dirac4cfd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: malformed grid, configuration or field.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// An evaluator produced NaN or Inf.
class NonFiniteValue : public Error {
public:
  using Error::Error;
};

/// The semi-implicit step size exceeds the stability bound.
class StabilityViolation : public Error {
public:
  StabilityViolation(const std::string& what, double tau, double tau_max)
      : Error(what), tau_(tau), tau_max_(tau_max) {}

  double tau() const noexcept { return tau_; }
  double tau_max() const noexcept { return tau_max_; }

private:
  double tau_;
  double tau_max_;
};

/// The implicit step's iteration hit its cap before reaching tolerance.
class SolverFailure : public Error {
public:
  SolverFailure(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}

  /// Relative residual after each iteration.
  const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
  std::vector<double> residuals_;
};

}  // namespace dirac4cfd
