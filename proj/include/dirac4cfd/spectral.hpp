#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "dirac4cfd/error.hpp"
#include "dirac4cfd/fft.hpp"
#include "dirac4cfd/field.hpp"
#include "dirac4cfd/grid.hpp"
#include "dirac4cfd/pauli.hpp"

namespace dirac4cfd {

/**
 * Discrete Fourier coefficients of a spinor field,
 *   U~_l = (1/N) sum_j U_j exp(-2 i j l pi / N),  l = -N/2 .. N/2-1,
 * applied per dimension in 2D. Storage follows FFT slot order.
 */
class ModeSpectrum {
public:
  ModeSpectrum() = default;
  explicit ModeSpectrum(const Grid& grid) : grid_(grid), coeffs_(grid.size()) {}

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Spinor& coefficient(long l) { return coeffs_[grid_.mode_slot(l)]; }
  const Spinor& coefficient(long l) const { return coeffs_[grid_.mode_slot(l)]; }
  Spinor& coefficient(long l1, long l2) {
    return coeffs_[grid_.mode_slot(l1) * grid_.n() + grid_.mode_slot(l2)];
  }
  const Spinor& coefficient(long l1, long l2) const {
    return coeffs_[grid_.mode_slot(l1) * grid_.n() + grid_.mode_slot(l2)];
  }

  /// Slot-order access.
  Spinor& operator[](std::size_t k) { return coeffs_[k]; }
  const Spinor& operator[](std::size_t k) const { return coeffs_[k]; }
  Spinor* data() noexcept { return coeffs_.data(); }
  const Spinor* data() const noexcept { return coeffs_.data(); }

private:
  Grid grid_;
  std::vector<Spinor> coeffs_;
};

inline ModeSpectrum dft_forward(const SpinorField& field) {
  ModeSpectrum spec(field.grid());
  fft::transform(field.grid(), field.data(), spec.data(), fft::Direction::Forward);
  const double scale = 1.0 / static_cast<double>(field.grid().size());
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= scale;
  return spec;
}

inline SpinorField dft_inverse(const ModeSpectrum& spec) {
  SpinorField field(spec.grid());
  fft::transform(spec.grid(), spec.data(), field.data(), fft::Direction::Backward);
  return field;
}

/// Symbol of the (1,4,1)/6 average at angle mu_l h: (cos(mu_l h) + 2) / 3.
inline double gamma_symbol(double mu_h) { return (std::cos(mu_h) + 2.0) / 3.0; }

/// gamma_l for mode l on an N-point grid of mesh size h.
inline double gamma(long l, std::size_t n, double h) {
  const double mu = 2.0 * std::numbers::pi * static_cast<double>(l) / (static_cast<double>(n) * h);
  return gamma_symbol(mu * h);
}

/// Per-slot value of gamma_l and sin(mu_l h) along one axis.
struct AxisSymbols {
  std::vector<double> gamma;
  std::vector<double> sin_mu_h;
};

inline AxisSymbols axis_symbols(const Grid& grid) {
  AxisSymbols s;
  s.gamma.resize(grid.n());
  s.sin_mu_h.resize(grid.n());
  for (std::size_t k = 0; k < grid.n(); ++k) {
    const double mh = grid.mu(grid.mode_index(k)) * grid.h();
    s.gamma[k] = gamma_symbol(mh);
    s.sin_mu_h[k] = std::sin(mh);
  }
  return s;
}

namespace detail {

inline void check_axis(const Grid& grid, int axis) {
  if (axis < 1 || axis > grid.dim()) throw InvalidArgument("axis out of range for grid dimension");
}

// Applies a three-point periodic stencil w_m U_{j-1} + w_0 U_j + w_p U_{j+1} along `axis`.
inline SpinorField three_point(const SpinorField& u, int axis, double w_m, double w_0, double w_p) {
  const Grid& g = u.grid();
  check_axis(g, axis);
  const std::size_t n = g.n();
  SpinorField out(g);
  if (g.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jm = (j + n - 1) % n;
      const std::size_t jp = (j + 1) % n;
      out[j] = w_m * u[jm] + w_0 * u[j] + w_p * u[jp];
    }
    return out;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (axis == 1) {
        out.at(j, k) = w_m * u.at((j + n - 1) % n, k) + w_0 * u.at(j, k) + w_p * u.at((j + 1) % n, k);
      } else {
        out.at(j, k) = w_m * u.at(j, (k + n - 1) % n) + w_0 * u.at(j, k) + w_p * u.at(j, (k + 1) % n);
      }
    }
  }
  return out;
}

// Multiplies every coefficient by symbol(slot along axis) and transforms back.
template <class Symbol>
SpinorField apply_axis_symbol(const SpinorField& u, int axis, Symbol&& symbol) {
  const Grid& g = u.grid();
  check_axis(g, axis);
  ModeSpectrum spec = dft_forward(u);
  const std::size_t n = g.n();
  if (g.dim() == 1) {
    for (std::size_t k = 0; k < n; ++k) spec[k] *= symbol(k);
  } else {
    for (std::size_t k1 = 0; k1 < n; ++k1)
      for (std::size_t k2 = 0; k2 < n; ++k2) spec[k1 * n + k2] *= symbol(axis == 1 ? k1 : k2);
  }
  return dft_inverse(spec);
}

}  // namespace detail

/// Centered difference (U_{j+1} - U_{j-1}) / 2h along `axis`, periodic.
inline SpinorField apply_delta_x(const SpinorField& u, int axis = 1) {
  const double c = 0.5 / u.grid().h();
  return detail::three_point(u, axis, -c, 0.0, c);
}

/// Compact average (U_{j-1} + 4 U_j + U_{j+1}) / 6 along `axis`, periodic.
inline SpinorField apply_Ah(const SpinorField& u, int axis = 1) {
  return detail::three_point(u, axis, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0);
}

/// Inverse of the compact average, by division of mode l by gamma_l.
inline SpinorField apply_Ah_inv(const SpinorField& u, int axis = 1) {
  const AxisSymbols s = axis_symbols(u.grid());
  return detail::apply_axis_symbol(u, axis, [&](std::size_t k) { return Complex(1.0 / s.gamma[k]); });
}

/// Fourth-order compact first derivative A_h^{-1} delta_x along `axis`.
inline SpinorField compact_derivative(const SpinorField& u, int axis = 1) {
  return apply_Ah_inv(apply_delta_x(u, axis), axis);
}

/// Pseudospectral derivative; the Nyquist mode l = -N/2 is zeroed.
inline SpinorField spectral_derivative(const SpinorField& u, int axis = 1) {
  const Grid& g = u.grid();
  return detail::apply_axis_symbol(u, axis, [&](std::size_t k) {
    const long l = g.mode_index(k);
    if (l == -static_cast<long>(g.n() / 2)) return Complex(0.0);
    return kI * g.mu(l);
  });
}

}  // namespace dirac4cfd
