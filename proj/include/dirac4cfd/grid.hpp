#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "dirac4cfd/error.hpp"

namespace dirac4cfd {

/// Spatial point; the second coordinate is ignored on 1D grids.
using Point = std::array<double, 2>;

/**
 * Periodic uniform grid on (a, b) in 1D or the square (a, b)^2 in 2D.
 *
 * Nodes are x_j = a + j h for j = 0..N-1; node N coincides with node 0 and is
 * never stored. Mode indices run over l = -N/2 .. N/2-1 with frequencies
 * mu_l = 2 pi l / (b - a).
 */
class Grid {
public:
  Grid() = default;

  int dim() const noexcept { return dim_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  /// Points per dimension.
  std::size_t n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  /// Total number of stored nodes (N or N^2).
  std::size_t size() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  /// Product of the per-dimension mesh sizes; weight of one node in l2 sums.
  double cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }

  double coord(std::size_t j) const noexcept { return a_ + static_cast<double>(j) * h_; }

  /// Node location for flat index `idx` (row-major, x is the slow axis).
  Point node(std::size_t idx) const noexcept {
    if (dim_ == 1) return {coord(idx), 0.0};
    return {coord(idx / n_), coord(idx % n_)};
  }

  /// Mode index l in -N/2..N/2-1 for FFT storage slot k in 0..N-1.
  long mode_index(std::size_t k) const noexcept {
    const auto half = static_cast<long>(n_ / 2);
    const auto kl = static_cast<long>(k);
    return kl < half ? kl : kl - static_cast<long>(n_);
  }

  /// FFT storage slot for mode index l.
  std::size_t mode_slot(long l) const noexcept {
    return static_cast<std::size_t>(l < 0 ? l + static_cast<long>(n_) : l);
  }

  double mu(long l) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(l) / length();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

  friend Grid build_grid(double a, double b, std::size_t n, int dim);

private:
  int dim_ = 1;
  double a_ = 0.0;
  double b_ = 1.0;
  std::size_t n_ = 0;
  double h_ = 0.0;
};

inline Grid build_grid(double a, double b, std::size_t n, int dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidArgument("grid bounds must satisfy a < b");
  if (n < 4 || n % 2 != 0)
    throw InvalidArgument("grid size N must be even and at least 4, got " + std::to_string(n));
  Grid g;
  g.dim_ = dim;
  g.a_ = a;
  g.b_ = b;
  g.n_ = n;
  g.h_ = (b - a) / static_cast<double>(n);
  return g;
}

/// Grid with the given mesh size; (b - a) / h must be an even integer.
inline Grid build_grid_with_h(double a, double b, double h, int dim) {
  if (!(h > 0.0)) throw InvalidArgument("mesh size must be positive");
  const double ratio = (b - a) / h;
  const double n = std::round(ratio);
  if (std::abs(n - ratio) > 1e-9 * ratio)
    throw InvalidArgument("domain length is not an integer multiple of h");
  return build_grid(a, b, static_cast<std::size_t>(n), dim);
}

}  // namespace dirac4cfd
