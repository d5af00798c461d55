#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "dirac4cfd/error.hpp"
#include "dirac4cfd/grid.hpp"
#include "dirac4cfd/pauli.hpp"

namespace dirac4cfd {

/// Spinor samples on every stored node of a grid.
class SpinorField {
public:
  SpinorField() = default;
  explicit SpinorField(const Grid& grid) : grid_(grid), values_(grid.size()) {}
  SpinorField(const Grid& grid, std::vector<Spinor> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("field size does not match grid");
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  Spinor& operator[](std::size_t i) { return values_[i]; }
  const Spinor& operator[](std::size_t i) const { return values_[i]; }

  /// 2D access; j indexes x, k indexes y.
  Spinor& at(std::size_t j, std::size_t k) { return values_[j * grid_.n() + k]; }
  const Spinor& at(std::size_t j, std::size_t k) const { return values_[j * grid_.n() + k]; }

  std::span<Spinor> values() noexcept { return values_; }
  std::span<const Spinor> values() const noexcept { return values_; }

  Spinor* data() noexcept { return values_.data(); }
  const Spinor* data() const noexcept { return values_.data(); }

  SpinorField& operator+=(const SpinorField& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  SpinorField& operator-=(const SpinorField& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  SpinorField& operator*=(Complex s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
  friend SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
  friend SpinorField operator*(Complex s, SpinorField a) { return a *= s; }

private:
  Grid grid_;
  std::vector<Spinor> values_;
};

/// Squared discrete l2 norm, h * sum |U_j|^2 (h^2 in 2D).
inline double l2_norm_squared(const SpinorField& u) {
  double s = 0.0;
  for (const auto& v : u.values()) s += norm2(v);
  return u.grid().cell_volume() * s;
}

inline double l2_norm(const SpinorField& u) { return std::sqrt(l2_norm_squared(u)); }

inline double max_norm(const SpinorField& u) {
  double m = 0.0;
  for (const auto& v : u.values()) m = std::max(m, std::sqrt(norm2(v)));
  return m;
}

inline bool all_finite(const SpinorField& u) {
  for (const auto& v : u.values())
    if (!is_finite(v)) return false;
  return true;
}

using SpinorFunction = std::function<Spinor(const Point&)>;

/// Samples `f` at every node. Throws NonFiniteValue naming the first bad node.
inline SpinorField sample_field(const SpinorFunction& f, const Grid& grid) {
  SpinorField u(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.node(i);
    const Spinor v = f(p);
    if (!is_finite(v)) {
      std::ostringstream os;
      os << "non-finite initial data at node " << i << " (x=" << p[0];
      if (grid.dim() == 2) os << ", y=" << p[1];
      os << ")";
      throw NonFiniteValue(os.str());
    }
    u[i] = v;
  }
  return u;
}

/**
 * Reads a fine-grid field at the nodes of a coarser grid on the same domain.
 * The fine N must be an integer multiple of the coarse N; no interpolation.
 */
inline SpinorField restrict_to(const SpinorField& fine, const Grid& coarse) {
  const Grid& fg = fine.grid();
  if (fg.dim() != coarse.dim() || fg.a() != coarse.a() || fg.b() != coarse.b())
    throw InvalidArgument("restriction requires matching domains and dimension");
  if (coarse.n() == 0 || fg.n() % coarse.n() != 0)
    throw InvalidArgument("fine grid size " + std::to_string(fg.n()) +
                          " is not a multiple of coarse grid size " + std::to_string(coarse.n()));
  const std::size_t r = fg.n() / coarse.n();
  SpinorField out(coarse);
  if (coarse.dim() == 1) {
    for (std::size_t j = 0; j < coarse.n(); ++j) out[j] = fine[j * r];
  } else {
    for (std::size_t j = 0; j < coarse.n(); ++j)
      for (std::size_t k = 0; k < coarse.n(); ++k) out.at(j, k) = fine.at(j * r, k * r);
  }
  return out;
}

}  // namespace dirac4cfd
