#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "dirac4cfd/error.hpp"
#include "dirac4cfd/grid.hpp"
#include "dirac4cfd/pauli.hpp"

namespace dirac4cfd {

using ScalarFunction = std::function<double(double t, const Point& x)>;

/**
 * Electric potential V and magnetic potential components A_j.
 *
 * The bounds V_max and A_max[j] are sound only after compute_bounds() has
 * sampled the time levels a run will use.
 */
struct PotentialSet {
  ScalarFunction V;
  std::vector<ScalarFunction> A;
  bool time_independent = true;

  double V_max = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> A_max;

  bool has_bounds() const { return !std::isnan(V_max) && A_max.size() == A.size(); }

  double a_max_sum() const {
    double s = 0.0;
    for (double m : A_max) s += m;
    return s;
  }

  /// Potential matrix V I - sum_j A_j sigma_j at one point.
  Mat2 matrix(double t, const Point& x) const {
    const double v = V ? V(t, x) : 0.0;
    const double a1 = A.size() > 0 ? A[0](t, x) : 0.0;
    const double a2 = A.size() > 1 ? A[1](t, x) : 0.0;
    return pauli::combine(v, -a1, -a2, 0.0);
  }
};

/// Zero potentials for a `dim`-dimensional problem.
inline PotentialSet free_potentials(int dim) {
  PotentialSet p;
  p.V = [](double, const Point&) { return 0.0; };
  for (int j = 0; j < dim; ++j) p.A.push_back([](double, const Point&) { return 0.0; });
  return p;
}

/// V and A_j sampled at every node at one time.
struct NodePotentials {
  double t = 0.0;
  std::vector<double> V;
  std::vector<std::vector<double>> A;

  Mat2 matrix(std::size_t i) const {
    const double a1 = A.size() > 0 ? A[0][i] : 0.0;
    const double a2 = A.size() > 1 ? A[1][i] : 0.0;
    return pauli::combine(V[i], -a1, -a2, 0.0);
  }
};

namespace detail {

inline double checked(double v, const char* name, double t, const Point& x, int dim) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite potential " << name << " at t=" << t << ", x=" << x[0];
    if (dim == 2) os << ", y=" << x[1];
    throw NonFiniteValue(os.str());
  }
  return v;
}

}  // namespace detail

inline NodePotentials sample_potentials(const PotentialSet& p, const Grid& grid, double t) {
  if (p.A.size() != static_cast<std::size_t>(grid.dim()))
    throw InvalidArgument("potential set dimension does not match grid");
  NodePotentials out;
  out.t = t;
  out.V.resize(grid.size());
  out.A.assign(p.A.size(), std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.node(i);
    out.V[i] = p.V ? detail::checked(p.V(t, x), "V", t, x, grid.dim()) : 0.0;
    for (std::size_t j = 0; j < p.A.size(); ++j)
      out.A[j][i] = detail::checked(p.A[j](t, x), j == 0 ? "A1" : "A2", t, x, grid.dim());
  }
  return out;
}

/**
 * Fills V_max and A_max by sampling on a 4x per-dimension refinement of
 * `grid` at each of `times`. Time-independent sets use only the first time.
 */
inline void compute_bounds(PotentialSet& p, const Grid& grid, std::span<const double> times) {
  const Grid fine = build_grid(grid.a(), grid.b(), 4 * grid.n(), grid.dim());
  double vmax = 0.0;
  std::vector<double> amax(p.A.size(), 0.0);
  const std::size_t levels = times.empty() ? 1 : (p.time_independent ? 1 : times.size());
  for (std::size_t lvl = 0; lvl < levels; ++lvl) {
    const double t = times.empty() ? 0.0 : times[lvl];
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const Point x = fine.node(i);
      if (p.V) vmax = std::max(vmax, std::abs(detail::checked(p.V(t, x), "V", t, x, grid.dim())));
      for (std::size_t j = 0; j < p.A.size(); ++j)
        amax[j] = std::max(amax[j], std::abs(detail::checked(p.A[j](t, x), "A", t, x, grid.dim())));
    }
  }
  p.V_max = vmax;
  p.A_max = std::move(amax);
}

}  // namespace dirac4cfd
