#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirac4cfd/error.hpp"
#include "dirac4cfd/field.hpp"
#include "dirac4cfd/potentials.hpp"

namespace dirac4cfd {

/// Domain, potentials and initial data of one experiment.
struct Problem {
  std::string name;
  int dim = 1;
  double a = 0.0;
  double b = 1.0;
  PotentialSet potentials;
  SpinorFunction initial;
  /// Analytic d_j Phi_0 per axis, when known.
  std::vector<SpinorFunction> initial_gradient;
};

namespace problems {

/// 1D test problem on (0, 2 pi): V = 1/(1 + sin^2 x), A_1 = sin 2x.
inline Problem dirac1d_standard() {
  Problem p;
  p.name = "dirac1d-standard";
  p.dim = 1;
  p.a = 0.0;
  p.b = 2.0 * std::numbers::pi;
  p.potentials.V = [](double, const Point& x) {
    const double s = std::sin(x[0]);
    return 1.0 / (1.0 + s * s);
  };
  p.potentials.A = {[](double, const Point& x) { return std::sin(2.0 * x[0]); }};
  p.initial = [](const Point& x) {
    const double s = std::sin(x[0]);
    return Spinor{1.0 / (1.0 + s * s), 1.0 / (3.0 + std::cos(x[0]))};
  };
  p.initial_gradient = {[](const Point& x) {
    const double s = std::sin(x[0]);
    const double d1 = 1.0 + s * s;
    const double d2 = 3.0 + std::cos(x[0]);
    return Spinor{-std::sin(2.0 * x[0]) / (d1 * d1), std::sin(x[0]) / (d2 * d2)};
  }};
  return p;
}

/// Honeycomb lattice potential on (-32, 32)^2 with Gaussian initial data.
inline Problem honeycomb_2d() {
  Problem p;
  p.name = "honeycomb-2d";
  p.dim = 2;
  p.a = -32.0;
  p.b = 32.0;
  p.potentials.V = [](double, const Point& x) {
    const double k = 4.0 * std::numbers::pi / std::sqrt(3.0);
    const double r3 = std::sqrt(3.0) / 2.0;
    return std::cos(k * (-x[0])) + std::cos(k * (0.5 * x[0] + r3 * x[1])) +
           std::cos(k * (0.5 * x[0] - r3 * x[1]));
  };
  p.potentials.A = {[](double, const Point&) { return 0.0; }, [](double, const Point&) { return 0.0; }};
  p.initial = [](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double s2 = (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
    return Spinor{std::exp(-0.5 * r2), std::exp(-0.5 * s2)};
  };
  p.initial_gradient = {
      [](const Point& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        const double s2 = (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
        return Spinor{-x[0] * std::exp(-0.5 * r2), -(x[0] - 1.0) * std::exp(-0.5 * s2)};
      },
      [](const Point& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        const double s2 = (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
        return Spinor{-x[1] * std::exp(-0.5 * r2), -x[1] * std::exp(-0.5 * s2)};
      }};
  return p;
}

/// Periodic electric and magnetic potentials on (0, 2 pi)^2.
inline Problem periodic_em_2d() {
  Problem p;
  p.name = "periodic-em-2d";
  p.dim = 2;
  p.a = 0.0;
  p.b = 2.0 * std::numbers::pi;
  p.potentials.V = [](double, const Point& x) {
    const double s = std::sin(x[0]);
    const double c = std::cos(x[1]);
    return 1.0 / (1.0 + s * s + c * c);
  };
  p.potentials.A = {
      [](double, const Point& x) { return std::sin(2.0 * x[0]) * std::sin(2.0 * x[1]); },
      [](double, const Point& x) { return 2.0 * std::sin(x[0]) * std::cos(x[1]); }};
  p.initial = [](const Point& x) {
    const double sx = std::sin(x[0]);
    const double sy = std::sin(x[1]);
    return Spinor{1.0 / (1.0 + sx * sx + sy * sy), 1.0 / (3.0 + std::cos(x[0]) * sy)};
  };
  p.initial_gradient = {
      [](const Point& x) {
        const double sx = std::sin(x[0]);
        const double sy = std::sin(x[1]);
        const double d1 = 1.0 + sx * sx + sy * sy;
        const double d2 = 3.0 + std::cos(x[0]) * sy;
        return Spinor{-std::sin(2.0 * x[0]) / (d1 * d1), std::sin(x[0]) * sy / (d2 * d2)};
      },
      [](const Point& x) {
        const double sx = std::sin(x[0]);
        const double sy = std::sin(x[1]);
        const double d1 = 1.0 + sx * sx + sy * sy;
        const double d2 = 3.0 + std::cos(x[0]) * sy;
        return Spinor{-std::sin(2.0 * x[1]) / (d1 * d1), -std::cos(x[0]) * std::cos(x[1]) / (d2 * d2)};
      }};
  return p;
}

inline std::vector<std::string> preset_names() { return {"dirac1d-standard", "honeycomb-2d", "periodic-em-2d"}; }

inline Problem preset(std::string_view name) {
  if (name == "dirac1d-standard") return dirac1d_standard();
  if (name == "honeycomb-2d") return honeycomb_2d();
  if (name == "periodic-em-2d") return periodic_em_2d();
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

}  // namespace problems

}  // namespace dirac4cfd
