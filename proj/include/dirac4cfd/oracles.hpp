#pragma once

// Dense-matrix reference implementations. Every routine here assembles the
// stencil operators as explicit matrices and solves with a direct LU
// factorization, sharing no code path with the Fourier-space steppers.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dirac4cfd/field.hpp"
#include "dirac4cfd/pauli.hpp"
#include "dirac4cfd/potentials.hpp"

namespace dirac4cfd::oracle {

using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

/// Periodic circulant N x N matrix with the stencil (w_m, w_0, w_p).
inline RealMatrix circulant(std::size_t n, double w_m, double w_0, double w_p) {
  RealMatrix m = RealMatrix::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    m(j, (j + n - 1) % n) += w_m;
    m(j, j) += w_0;
    m(j, (j + 1) % n) += w_p;
  }
  return m;
}

inline RealMatrix delta_x_matrix(std::size_t n, double h) { return circulant(n, -0.5 / h, 0.0, 0.5 / h); }
inline RealMatrix ah_matrix(std::size_t n) { return circulant(n, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0); }

/// Compact derivative A_h^{-1} delta_x on one axis, by dense inversion.
inline RealMatrix compact_derivative_matrix(std::size_t n, double h) {
  return ah_matrix(n).inverse() * delta_x_matrix(n, h);
}

/// Embeds an axis operator into the flat node ordering of the grid.
inline RealMatrix axis_operator(const Grid& g, const RealMatrix& op, int axis) {
  if (g.dim() == 1) return op;
  const std::size_t n = g.n();
  const RealMatrix id = RealMatrix::Identity(n, n);
  RealMatrix out = RealMatrix::Zero(n * n, n * n);
  // Flat index j * n + k; axis 1 acts on j, axis 2 on k.
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t jj = 0; jj < n; ++jj)
        for (std::size_t kk = 0; kk < n; ++kk) {
          const double v = axis == 1 ? op(j, jj) * id(k, kk) : id(j, jj) * op(k, kk);
          if (v != 0.0) out(j * n + k, jj * n + kk) = v;
        }
  return out;
}

/// Kronecker product of a node operator with a 2x2 spinor matrix; index = 2 node + component.
inline DenseMatrix kron(const RealMatrix& nodes, const Mat2& s) {
  const auto n = nodes.rows();
  DenseMatrix out = DenseMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = nodes(i, j);
      if (v == 0.0) continue;
      out(2 * i, 2 * j) = v * s.a;
      out(2 * i, 2 * j + 1) = v * s.b;
      out(2 * i + 1, 2 * j) = v * s.c;
      out(2 * i + 1, 2 * j + 1) = v * s.d;
    }
  return out;
}

/// Free part (1/eps)(-i sum_j sigma_j A_h^{-1} delta_j + sigma_3) as a dense matrix.
inline DenseMatrix kinetic_matrix(const Grid& g, double eps) {
  const RealMatrix d = compact_derivative_matrix(g.n(), g.h());
  const RealMatrix id = RealMatrix::Identity(g.size(), g.size());
  DenseMatrix k = kron(axis_operator(g, d, 1), pauli::sigma1) * Complex(0.0, -1.0);
  if (g.dim() == 2) k += kron(axis_operator(g, d, 2), pauli::sigma2) * Complex(0.0, -1.0);
  k += kron(id, pauli::sigma3);
  return k / eps;
}

/// Block-diagonal potential V_j I - sum A_{l,j} sigma_l.
inline DenseMatrix potential_matrix(const NodePotentials& p) {
  const auto n = static_cast<Eigen::Index>(p.V.size());
  DenseMatrix g = DenseMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Mat2 m = p.matrix(static_cast<std::size_t>(i));
    g(2 * i, 2 * i) = m.a;
    g(2 * i, 2 * i + 1) = m.b;
    g(2 * i + 1, 2 * i) = m.c;
    g(2 * i + 1, 2 * i + 1) = m.d;
  }
  return g;
}

inline DenseVector to_vector(const SpinorField& u) {
  DenseVector v(2 * static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    v(2 * static_cast<Eigen::Index>(i)) = u[i].c1;
    v(2 * static_cast<Eigen::Index>(i) + 1) = u[i].c2;
  }
  return v;
}

inline SpinorField to_field(const DenseVector& v, const Grid& g) {
  SpinorField u(g);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = {v(2 * static_cast<Eigen::Index>(i)), v(2 * static_cast<Eigen::Index>(i) + 1)};
  return u;
}

/// Solves i (x - prev)/(2 tau) = K (x + prev)/2 + G curr for x.
inline SpinorField semi_implicit_step(const SpinorField& prev, const SpinorField& curr, const NodePotentials& pots_n,
                                      double eps, double tau) {
  const Grid& g = curr.grid();
  const DenseMatrix k = kinetic_matrix(g, eps);
  const auto m = k.rows();
  const DenseMatrix id = DenseMatrix::Identity(m, m);
  const Complex c(0.0, 1.0 / (2.0 * tau));
  const DenseMatrix lhs = c * id - 0.5 * k;
  const DenseVector rhs = (c * id + 0.5 * k) * to_vector(prev) + potential_matrix(pots_n) * to_vector(curr);
  return to_field(lhs.partialPivLu().solve(rhs), g);
}

/// Solves i (x - curr)/tau = (K + G)(x + curr)/2 for x.
inline SpinorField implicit_step(const SpinorField& curr, const NodePotentials& pots_half, double eps, double tau) {
  const Grid& g = curr.grid();
  const DenseMatrix h = kinetic_matrix(g, eps) + potential_matrix(pots_half);
  const DenseMatrix id = DenseMatrix::Identity(h.rows(), h.cols());
  const Complex half(0.0, 0.5 * tau);
  const DenseMatrix lhs = id + half * h;
  const DenseVector rhs = (id - half * h) * to_vector(curr);
  return to_field(lhs.partialPivLu().solve(rhs), g);
}

/// Energy as the quadratic form h u^* (K + G) u.
inline double energy(const SpinorField& u, const NodePotentials& pots, double eps) {
  const DenseVector v = to_vector(u);
  const DenseMatrix h = kinetic_matrix(u.grid(), eps) + potential_matrix(pots);
  const Complex e = v.dot(h * v);  // Eigen's dot conjugates the first argument.
  return u.grid().cell_volume() * e.real();
}

/// Fourier coefficients by direct O(N^2) summation (1D).
inline std::vector<Spinor> direct_dft(const SpinorField& u) {
  const std::size_t n = u.size();
  std::vector<Spinor> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Spinor acc;
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j * k % n) / static_cast<double>(n);
      acc += std::polar(1.0, ang) * u[j];
    }
    out[k] = acc * Complex(1.0 / static_cast<double>(n));
  }
  return out;
}

/// Generic 2x2 exponential exp(m) by scaling and squaring a Taylor series.
inline Mat2 expm(const Mat2& m) {
  double norm = max_abs(m);
  int squarings = 0;
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const Mat2 scaled = m * Complex(std::ldexp(1.0, -squarings));
  Mat2 result = pauli::identity;
  Mat2 term = pauli::identity;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled * Complex(1.0 / k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Uniformly random field with components in the unit square.
inline SpinorField random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SpinorField u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = {{dist(rng), dist(rng)}, {dist(rng), dist(rng)}};
  return u;
}

inline double max_diff(const SpinorField& a, const SpinorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Spinor d = a[i] - b[i];
    m = std::max({m, std::abs(d.c1), std::abs(d.c2)});
  }
  return m;
}

}  // namespace dirac4cfd::oracle
