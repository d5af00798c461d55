#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirac4cfd/error.hpp"

namespace dirac4cfd {

enum class Scheme { Implicit4cFD, SemiImplicit4cFD, TSSPReference };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Implicit4cFD: return "implicit";
    case Scheme::SemiImplicit4cFD: return "semi";
    case Scheme::TSSPReference: return "tssp";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "implicit" || s == "implicit-4cfd") return Scheme::Implicit4cFD;
  if (s == "semi" || s == "semi-implicit" || s == "semi-implicit-4cfd") return Scheme::SemiImplicit4cFD;
  if (s == "tssp" || s == "tssp-reference") return Scheme::TSSPReference;
  throw InvalidArgument("unknown scheme '" + std::string(s) + "'");
}

/// Relative tolerance on t_final / tau being an integer.
inline constexpr double kStepCountTolerance = 1e-9;

struct SchemeConfig {
  double epsilon = 1.0;
  double tau = 1e-3;
  double t_final = 1.0;
  Scheme scheme = Scheme::SemiImplicit4cFD;
  double linear_solver_tol = 1e-12;
  int linear_solver_max_iter = 200;
  std::vector<double> snapshot_times;
  /// Run the semi-implicit scheme even when tau exceeds the stability bound.
  bool allow_unstable = false;
  /// Record mass (and energy for time-independent potentials) every step.
  bool diagnostics = false;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in (0, 1]");
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    if (!(t_final >= tau)) throw InvalidArgument("t_final must be at least tau");
    if (!(linear_solver_tol > 0.0)) throw InvalidArgument("linear solver tolerance must be positive");
    if (linear_solver_max_iter < 1) throw InvalidArgument("linear solver iteration cap must be >= 1");
    (void)n_steps();
    for (double t : snapshot_times) (void)step_of(t);
  }

  /// Number of steps to reach t_final; rejects non-integral t_final / tau.
  std::size_t n_steps() const {
    const double ratio = t_final / tau;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(n * tau - t_final) > kStepCountTolerance * t_final)
      throw InvalidArgument("t_final / tau = " + std::to_string(ratio) + " is not an integer");
    return static_cast<std::size_t>(n);
  }

  /// Step index at which time t is reached; t must be a multiple of tau in [0, t_final].
  std::size_t step_of(double t) const {
    if (t < 0.0 || t > t_final * (1.0 + kStepCountTolerance))
      throw InvalidArgument("snapshot time outside [0, t_final]");
    const double n = std::round(t / tau);
    if (std::abs(n * tau - t) > kStepCountTolerance * std::max(t_final, tau))
      throw InvalidArgument("snapshot time " + std::to_string(t) + " is not a multiple of tau");
    return static_cast<std::size_t>(n);
  }
};

}  // namespace dirac4cfd
