#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dirac4cfd/config.hpp"
#include "dirac4cfd/error.hpp"
#include "dirac4cfd/field.hpp"
#include "dirac4cfd/potentials.hpp"
#include "dirac4cfd/spectral.hpp"

namespace dirac4cfd {

/// Phi^n and Phi^{n-1} of the three-level semi-implicit recurrence.
struct TwoLevelState {
  SpinorField phi_curr;
  SpinorField phi_prev;
  std::size_t n = 1;
  double t = 0.0;
};

struct StabilityReport {
  double tau_max = std::numeric_limits<double>::infinity();
  bool ok = true;
  Scheme scheme = Scheme::SemiImplicit4cFD;
};

/**
 * Semi-implicit scheme: ok iff tau <= 1 / (V_max + sum_j A_max[j]).
 * The implicit scheme and the splitting reference are always ok.
 */
inline StabilityReport check_stability(const SchemeConfig& cfg, const PotentialSet& pots) {
  if (!pots.has_bounds()) throw InvalidArgument("potential bounds have not been computed");
  StabilityReport r;
  r.scheme = cfg.scheme;
  const double denom = pots.V_max + pots.a_max_sum();
  r.tau_max = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
  r.ok = cfg.scheme != Scheme::SemiImplicit4cFD || cfg.tau <= r.tau_max;
  return r;
}

/// Von Neumann amplification factor of the implicit scheme for frozen V0, A10.
inline Complex amplification_factor(double mu_h, int sign, double h, double eps, double tau, double V0,
                                     double A10) {
  const double g = gamma_symbol(mu_h);
  const double inner_term = -eps * A10 * h + std::sin(mu_h) / g;
  const double theta = -V0 + (sign >= 0 ? 1.0 : -1.0) / (eps * h) * std::sqrt(h * h + inner_term * inner_term);
  return (2.0 + kI * tau * theta) / (2.0 - kI * tau * theta);
}

inline Complex amplification_factor(long l, int sign, const Grid& grid, const SchemeConfig& cfg, double V0,
                                    double A10) {
  return amplification_factor(grid.mu(l) * grid.h(), sign, grid.h(), cfg.epsilon, cfg.tau, V0, A10);
}

/**
 * Second-order start for the semi-implicit scheme:
 *   Phi^1 = Phi_0 - sin(tau/eps) sum_j sigma_j d_j Phi_0
 *           - i [ sin(tau/eps) sigma_3 + tau (V^0 - sum_j A^0_j sigma_j) ] Phi_0.
 * `gradient` holds d_x Phi_0 (and d_y Phi_0 in 2D) at the nodes.
 */
inline SpinorField first_step(const SpinorField& phi0, std::span<const SpinorField> gradient,
                              const NodePotentials& pots0, const SchemeConfig& cfg) {
  const Grid& g = phi0.grid();
  if (gradient.size() != static_cast<std::size_t>(g.dim()))
    throw InvalidArgument("first step needs one derivative field per dimension");
  const double s = std::sin(cfg.tau / cfg.epsilon);
  SpinorField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Spinor& p = phi0[i];
    Spinor v = p - s * pauli::apply_sigma1(gradient[0][i]);
    if (g.dim() == 2) v -= s * pauli::apply_sigma2(gradient[1][i]);
    const Spinor rhs = s * pauli::apply_sigma3(p) + cfg.tau * (pots0.matrix(i) * p);
    v -= kI * rhs;
    out[i] = v;
  }
  return out;
}

/// Gradient by pseudospectral differentiation, one field per axis.
inline std::vector<SpinorField> spectral_gradient(const SpinorField& u) {
  std::vector<SpinorField> grad;
  for (int axis = 1; axis <= u.grid().dim(); ++axis) grad.push_back(spectral_derivative(u, axis));
  return grad;
}

namespace detail {

inline SpinorField apply_potential(const SpinorField& u, const NodePotentials& pots) {
  SpinorField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = pots.matrix(i) * u[i];
  return out;
}

inline double spectrum_norm2(const ModeSpectrum& s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) acc += norm2(s[k]);
  return acc;
}

}  // namespace detail

/**
 * Semi-implicit 4cFD update, decoupled per Fourier mode:
 *   P_l (Phi^{n+1})~_l = Q_l (Phi^{n-1})~_l + 2 tau gamma_l (G^n Phi^n)~_l
 * with P_l = i gamma I - (tau/eps) K_l and Q_l = i gamma I + (tau/eps) K_l, where
 * K_l = (s_l/h) sigma_1 + gamma_l sigma_3 in 1D and, in 2D,
 * K = (s_1/h) gamma_2 sigma_1 + (s_2/h) gamma_1 sigma_2 + gamma_1 gamma_2 sigma_3.
 */
class SemiImplicitStepper {
public:
  using GammaFn = std::function<double(double)>;

  SemiImplicitStepper(const Grid& grid, double eps, double tau, const GammaFn& gamma_fn = gamma_symbol)
      : grid_(grid), tau_(tau) {
    if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (tau == 0.0 || !std::isfinite(tau)) throw InvalidArgument("tau must be finite and nonzero");
    const std::size_t n = grid.n();
    std::vector<double> gam(n), sn(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double mh = grid.mu(grid.mode_index(k)) * grid.h();
      gam[k] = gamma_fn(mh);
      sn[k] = std::sin(mh);
    }
    const double r = tau / eps;
    const double h = grid.h();
    const auto build = [&](std::size_t slot, double g, double b1, double b2) {
      const Mat2 k = pauli::combine(0.0, b1, b2, g);
      const Mat2 p = pauli::combine(kI * g, 0.0, 0.0, 0.0) - r * k;
      const Mat2 q = pauli::combine(kI * g, 0.0, 0.0, 0.0) + r * k;
      if (std::abs(p.det()) < g * g * (1.0 - 1e-12))
        throw Error("singular semi-implicit mode matrix at slot " + std::to_string(slot));
      const Mat2 pinv = p.inverse();
      propagate_[slot] = pinv * q;
      forcing_[slot] = pinv * Complex(2.0 * tau * g);
    };
    propagate_.resize(grid.size());
    forcing_.resize(grid.size());
    if (grid.dim() == 1) {
      for (std::size_t k = 0; k < n; ++k) build(k, gam[k], sn[k] / h, 0.0);
    } else {
      for (std::size_t k1 = 0; k1 < n; ++k1)
        for (std::size_t k2 = 0; k2 < n; ++k2)
          build(k1 * n + k2, gam[k1] * gam[k2], sn[k1] / h * gam[k2], sn[k2] / h * gam[k1]);
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  double tau() const noexcept { return tau_; }

  /// Phi^{n+1} from Phi^{n-1} (as a spectrum) and Phi^n with potentials sampled at t_n.
  ModeSpectrum step_spectral(const ModeSpectrum& prev_spec, const SpinorField& curr,
                             const NodePotentials& pots_n) const {
    const ModeSpectrum gphi = dft_forward(detail::apply_potential(curr, pots_n));
    ModeSpectrum next(grid_);
    for (std::size_t k = 0; k < next.size(); ++k)
      next[k] = propagate_[k] * prev_spec[k] + forcing_[k] * gphi[k];
    return next;
  }

  SpinorField step(const SpinorField& prev, const SpinorField& curr, const NodePotentials& pots_n) const {
    return dft_inverse(step_spectral(dft_forward(prev), curr, pots_n));
  }

private:
  Grid grid_;
  double tau_;
  std::vector<Mat2> propagate_;
  std::vector<Mat2> forcing_;
};

inline SpinorField semi_implicit_step(const TwoLevelState& state, const NodePotentials& pots_n,
                                      const SchemeConfig& cfg) {
  if (state.n < 1) throw InvalidArgument("semi-implicit step needs n >= 1");
  return SemiImplicitStepper(state.phi_curr.grid(), cfg.epsilon, cfg.tau).step(state.phi_prev, state.phi_curr, pots_n);
}

/**
 * Implicit (Crank-Nicolson type) 4cFD step in 1D:
 *   (I + i tau/2 K) Phi^{n+1} + i tau/2 G Phi^{n+1} = (I - i tau/2 K) Phi^n - i tau/2 G Phi^n,
 * with K = (1/eps)(-i sigma_1 A_h^{-1} delta_x + sigma_3) diagonal in Fourier space
 * and G = V^{n+1/2} - A_1^{n+1/2} sigma_1 pointwise. The potential term is
 * lagged in a fixed-point iteration whose per-mode left factor is exact.
 */
class ImplicitStepper {
public:
  ImplicitStepper(const Grid& grid, double eps, double tau, double tol = 1e-12, int max_iter = 200)
      : grid_(grid), tau_(tau), tol_(tol), max_iter_(max_iter) {
    if (grid.dim() != 1) throw InvalidArgument("the implicit scheme is implemented in 1D only");
    if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
    const AxisSymbols sym = axis_symbols(grid);
    lhs_inv_.resize(grid.n());
    rhs_.resize(grid.n());
    for (std::size_t k = 0; k < grid.n(); ++k) {
      const Mat2 kin = pauli::combine(0.0, sym.sin_mu_h[k] / (grid.h() * sym.gamma[k]), 0.0, 1.0) * Complex(1.0 / eps);
      const Mat2 half = kin * Complex(0.0, 0.5 * tau);
      lhs_inv_[k] = (pauli::identity + half).inverse();
      rhs_[k] = pauli::identity - half;
    }
  }

  /// Iterations and relative residuals of the last call to step().
  const std::vector<double>& last_residuals() const noexcept { return residuals_; }

  /// Phi^{n+1} from Phi^n with potentials sampled at t_n + tau/2.
  SpinorField step(const SpinorField& curr, const NodePotentials& pots_half) {
    residuals_.clear();
    const Complex half_i(0.0, 0.5 * tau_);
    const ModeSpectrum c = dft_forward(curr);
    ModeSpectrum g = dft_forward(detail::apply_potential(curr, pots_half));
    ModeSpectrum b(grid_);
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = rhs_[k] * c[k] - half_i * g[k];
    const double b_norm = std::sqrt(detail::spectrum_norm2(b));
    if (b_norm == 0.0) return SpinorField(grid_);

    ModeSpectrum x(grid_);
    ModeSpectrum delta(grid_);
    for (int it = 0; it < max_iter_; ++it) {
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = lhs_inv_[k] * (b[k] - half_i * g[k]);
      SpinorField phi = dft_inverse(x);
      ModeSpectrum g_new = dft_forward(detail::apply_potential(phi, pots_half));
      // x solves the system exactly with the lagged potential term, so the
      // true residual is the change in that term.
      for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = half_i * (g_new[k] - g[k]);
      const double res = std::sqrt(detail::spectrum_norm2(delta)) / b_norm;
      residuals_.push_back(res);
      if (res <= tol_) return phi;
      g = std::move(g_new);
    }
    throw SolverFailure("implicit step did not converge in " + std::to_string(max_iter_) +
                            " iterations (last residual " + std::to_string(residuals_.back()) + ")",
                        residuals_);
  }

private:
  Grid grid_;
  double tau_;
  double tol_;
  int max_iter_;
  std::vector<Mat2> lhs_inv_;
  std::vector<Mat2> rhs_;
  std::vector<double> residuals_;
};

inline SpinorField implicit_step_1d(const SpinorField& phi_n, const NodePotentials& pots_half,
                                    const SchemeConfig& cfg) {
  ImplicitStepper stepper(phi_n.grid(), cfg.epsilon, cfg.tau, cfg.linear_solver_tol, cfg.linear_solver_max_iter);
  return stepper.step(phi_n, pots_half);
}

}  // namespace dirac4cfd
