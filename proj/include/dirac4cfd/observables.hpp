#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dirac4cfd/error.hpp"
#include "dirac4cfd/field.hpp"
#include "dirac4cfd/potentials.hpp"
#include "dirac4cfd/spectral.hpp"

namespace dirac4cfd {

/// rho = Phi^* Phi per node.
inline std::vector<double> total_density(const SpinorField& u) {
  std::vector<double> rho(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = norm2(u[i]);
  return rho;
}

/// J_l = (1/eps) Phi^* sigma_l Phi per node, one array per dimension.
inline std::vector<std::vector<double>> current_density(const SpinorField& u, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  const int d = u.grid().dim();
  std::vector<std::vector<double>> J(d, std::vector<double>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Spinor& p = u[i];
    const double scale = norm2(p);
    for (int l = 0; l < d; ++l) {
      const Spinor sp = l == 0 ? pauli::apply_sigma1(p) : pauli::apply_sigma2(p);
      const Complex q = inner(p, sp);
      if (std::abs(q.imag()) > 1e-14 * std::max(1.0, scale))
        throw Error("current density has a non-real component");
      J[l][i] = q.real() / eps;
    }
  }
  return J;
}

/// ||Phi||^2_{l2} = h sum_j rho_j (h^2 in 2D).
inline double mass_l2(const SpinorField& u) {
  double s = 0.0;
  for (double r : total_density(u)) s += r;
  return u.grid().cell_volume() * s;
}

/**
 * Discrete energy
 *   E_h = h sum_j [ -(i/eps) Phi_j^* sigma_1 A_h^{-1} delta_x Phi_j + (1/eps) Phi_j^* sigma_3 Phi_j
 *                  + V_j |Phi_j|^2 - A_{1,j} Phi_j^* sigma_1 Phi_j ],
 * with the matching sigma_2 / y-direction terms in 2D. Conserved by the
 * implicit scheme when the potentials do not depend on time.
 */
inline double discrete_energy(const SpinorField& u, const NodePotentials& pots, double eps) {
  const Grid& g = u.grid();
  const int d = g.dim();
  if (pots.V.size() != u.size() || pots.A.size() != static_cast<std::size_t>(d))
    throw InvalidArgument("potential samples do not match field");
  std::vector<SpinorField> deriv;
  for (int axis = 1; axis <= d; ++axis) deriv.push_back(compact_derivative(u, axis));

  Complex total = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Spinor& p = u[i];
    Complex kinetic = inner(p, pauli::apply_sigma1(deriv[0][i]));
    if (d == 2) kinetic += inner(p, pauli::apply_sigma2(deriv[1][i]));
    Complex e = -kI / eps * kinetic + inner(p, pauli::apply_sigma3(p)) / eps + pots.V[i] * norm2(p);
    e -= pots.A[0][i] * inner(p, pauli::apply_sigma1(p));
    if (d == 2) e -= pots.A[1][i] * inner(p, pauli::apply_sigma2(p));
    total += e;
    scale += std::abs(e);
  }
  if (std::abs(total.imag()) > 1e-12 * std::max(1.0, scale))
    throw Error("discrete energy has a non-real residue " + std::to_string(total.imag()));
  return g.cell_volume() * total.real();
}

enum class Quantity { Phi, Rho, J };

inline std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Phi: return "phi";
    case Quantity::Rho: return "rho";
    case Quantity::J: return "J";
  }
  return "?";
}

/// Relative discrete l2 error of `num` against `ref` for the chosen quantity.
inline double relative_error(const SpinorField& num, const SpinorField& ref, Quantity which, double eps) {
  if (!(num.grid() == ref.grid())) throw InvalidArgument("relative error requires identical grids");
  double diff = 0.0;
  double base = 0.0;
  switch (which) {
    case Quantity::Phi:
      for (std::size_t i = 0; i < num.size(); ++i) {
        diff += norm2(num[i] - ref[i]);
        base += norm2(ref[i]);
      }
      break;
    case Quantity::Rho: {
      const auto rn = total_density(num);
      const auto rr = total_density(ref);
      for (std::size_t i = 0; i < rn.size(); ++i) {
        diff += (rn[i] - rr[i]) * (rn[i] - rr[i]);
        base += rr[i] * rr[i];
      }
      break;
    }
    case Quantity::J: {
      const auto jn = current_density(num, eps);
      const auto jr = current_density(ref, eps);
      for (std::size_t l = 0; l < jn.size(); ++l)
        for (std::size_t i = 0; i < jn[l].size(); ++i) {
          diff += (jn[l][i] - jr[l][i]) * (jn[l][i] - jr[l][i]);
          base += jr[l][i] * jr[l][i];
        }
      break;
    }
  }
  if (!(base > 0.0)) throw InvalidArgument("reference has zero norm");
  // The common factor h (h^2 in 2D) cancels.
  return std::sqrt(diff / base);
}

struct ErrorTriple {
  double e_phi = 0.0;
  double e_rho = 0.0;
  double e_J = 0.0;
};

inline ErrorTriple error_triple(const SpinorField& num, const SpinorField& ref, double eps) {
  return {relative_error(num, ref, Quantity::Phi, eps), relative_error(num, ref, Quantity::Rho, eps),
          relative_error(num, ref, Quantity::J, eps)};
}

/// order_k = log2(e_k / e_{k+1}); absent where either error is not positive.
inline std::vector<std::optional<double>> convergence_order(std::span<const double> errors) {
  std::vector<std::optional<double>> orders;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    if (errors[k] > 0.0 && errors[k + 1] > 0.0 && std::isfinite(errors[k]) && std::isfinite(errors[k + 1]))
      orders.emplace_back(std::log2(errors[k] / errors[k + 1]));
    else
      orders.emplace_back(std::nullopt);
  }
  return orders;
}

}  // namespace dirac4cfd
