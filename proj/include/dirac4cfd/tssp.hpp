#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dirac4cfd/config.hpp"
#include "dirac4cfd/error.hpp"
#include "dirac4cfd/field.hpp"
#include "dirac4cfd/potentials.hpp"
#include "dirac4cfd/spectral.hpp"

namespace dirac4cfd {

/**
 * exp(-i dt M) with M = (1/eps)(sum_j mu_j sigma_j + sigma_3), the exact flow
 * of the free Dirac operator on one Fourier mode. M^2 = lambda^2 I with
 * lambda = sqrt(1 + |mu|^2) / eps.
 */
inline Mat2 free_propagator_mode(std::span<const double> mu, double eps, double dt) {
  double mu2 = 0.0;
  for (double m : mu) mu2 += m * m;
  const double mu1 = mu.size() > 0 ? mu[0] : 0.0;
  const double mu_2 = mu.size() > 1 ? mu[1] : 0.0;
  const double lambda = std::sqrt(1.0 + mu2) / eps;
  const Mat2 m_over_lambda = pauli::combine(0.0, mu1, mu_2, 1.0) * Complex(1.0 / (eps * lambda));
  return pauli::identity * Complex(std::cos(dt * lambda)) - m_over_lambda * Complex(0.0, std::sin(dt * lambda));
}

/// exp(-i dt (V I - sum_j A_j sigma_j)); the |A| = 0 limit is exp(-i dt V) I.
inline Mat2 potential_propagator_point(double V, std::span<const double> A, double dt) {
  double a2 = 0.0;
  for (double a : A) a2 += a * a;
  const Complex phase = std::exp(Complex(0.0, -dt * V));
  const double amag = std::sqrt(a2);
  if (amag == 0.0) return pauli::identity * phase;
  const double a1 = A.size() > 0 ? A[0] : 0.0;
  const double a_2 = A.size() > 1 ? A[1] : 0.0;
  const Mat2 unit = pauli::combine(0.0, a1 / amag, a_2 / amag, 0.0);
  return (pauli::identity * Complex(std::cos(dt * amag)) + unit * Complex(0.0, std::sin(dt * amag))) * phase;
}

/// True when m^* m = I to `tol` in max-norm.
inline bool is_unitary(const Mat2& m, double tol = 1e-13) {
  return max_abs(m.adjoint() * m - pauli::identity) <= tol;
}

/**
 * Strang splitting: half potential flow, full free flow in Fourier space,
 * half potential flow. Potentials for the two half flows are sampled at the
 * midpoints of their substeps, t_n + dt/4 and t_n + 3dt/4.
 */
class TsspStepper {
public:
  TsspStepper(const Grid& grid, double eps, double dt, const PotentialSet& pots)
      : grid_(grid), eps_(eps), dt_(dt), pots_(pots) {
    if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
    free_.resize(grid.size());
    const std::size_t n = grid.n();
    if (grid.dim() == 1) {
      for (std::size_t k = 0; k < n; ++k) {
        const double mu[1] = {grid.mu(grid.mode_index(k))};
        free_[k] = free_propagator_mode(mu, eps, dt);
      }
    } else {
      for (std::size_t k1 = 0; k1 < n; ++k1)
        for (std::size_t k2 = 0; k2 < n; ++k2) {
          const double mu[2] = {grid.mu(grid.mode_index(k1)), grid.mu(grid.mode_index(k2))};
          free_[k1 * n + k2] = free_propagator_mode(mu, eps, dt);
        }
    }
    if (pots_.time_independent) {
      half_first_ = half_flow(0.0);
      half_second_ = half_first_;
    }
  }

  double dt() const noexcept { return dt_; }

  /// Advances `u` from t to t + dt in place.
  void advance(SpinorField& u, double t) const {
    if (pots_.time_independent) {
      apply_pointwise(u, half_first_);
      free_flow(u);
      apply_pointwise(u, half_second_);
    } else {
      apply_pointwise(u, half_flow(t + 0.25 * dt_));
      free_flow(u);
      apply_pointwise(u, half_flow(t + 0.75 * dt_));
    }
  }

  void free_flow(SpinorField& u) const {
    ModeSpectrum s = dft_forward(u);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = free_[k] * s[k];
    u = dft_inverse(s);
  }

private:
  std::vector<Mat2> half_flow(double t) const {
    const NodePotentials np = sample_potentials(pots_, grid_, t);
    std::vector<Mat2> out(grid_.size());
    std::vector<double> a(np.A.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) a[j] = np.A[j][i];
      out[i] = potential_propagator_point(np.V[i], a, 0.5 * dt_);
    }
    return out;
  }

  static void apply_pointwise(SpinorField& u, const std::vector<Mat2>& m) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = m[i] * u[i];
  }

  Grid grid_;
  double eps_;
  double dt_;
  PotentialSet pots_;
  std::vector<Mat2> free_;
  std::vector<Mat2> half_first_;
  std::vector<Mat2> half_second_;
};

/// One Strang step from t to t + dt.
inline SpinorField tssp_step(const SpinorField& u, const PotentialSet& pots, double t, double eps, double dt) {
  SpinorField out = u;
  TsspStepper(u.grid(), eps, dt, pots).advance(out, t);
  return out;
}

/**
 * Reference trajectory on a fine grid, returned at each of `sample_times`
 * (which must be multiples of tau_e). When `coarse_grids` is given, every
 * coarse N must divide the fine N so restriction reads coincident nodes.
 */
inline std::vector<SpinorField> compute_reference(const Grid& fine, double eps, double tau_e,
                                                  const SpinorFunction& phi0, const PotentialSet& pots,
                                                  std::span<const double> sample_times,
                                                  std::span<const Grid> coarse_grids = {}) {
  for (const Grid& c : coarse_grids) {
    if (c.dim() != fine.dim() || c.a() != fine.a() || c.b() != fine.b())
      throw InvalidArgument("coarse grid domain differs from the reference grid");
    if (fine.n() % c.n() != 0)
      throw InvalidArgument("reference grid size " + std::to_string(fine.n()) + " is not a multiple of " +
                            std::to_string(c.n()));
  }
  SchemeConfig timing;
  timing.tau = tau_e;
  double t_end = 0.0;
  for (double t : sample_times) t_end = std::max(t_end, t);
  timing.t_final = std::max(t_end, tau_e);

  std::vector<std::size_t> steps;
  for (double t : sample_times) steps.push_back(timing.step_of(t));

  SpinorField u = sample_field(phi0, fine);
  std::vector<SpinorField> out(sample_times.size());
  const std::size_t last = steps.empty() ? 0 : *std::max_element(steps.begin(), steps.end());
  const TsspStepper stepper(fine, eps, tau_e, pots);
  for (std::size_t n = 0;; ++n) {
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (steps[i] == n) out[i] = u;
    if (n >= last) break;
    stepper.advance(u, static_cast<double>(n) * tau_e);
  }
  return out;
}

}  // namespace dirac4cfd
