#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dirac4cfd/config.hpp"
#include "dirac4cfd/error.hpp"
#include "dirac4cfd/field.hpp"
#include "dirac4cfd/observables.hpp"
#include "dirac4cfd/potentials.hpp"
#include "dirac4cfd/steppers.hpp"
#include "dirac4cfd/tssp.hpp"

namespace dirac4cfd {

struct StepDiagnostics {
  std::size_t n = 0;
  double t = 0.0;
  double mass = 0.0;
  std::optional<double> energy;
};

struct Trajectory {
  std::vector<double> snapshot_times;
  std::vector<SpinorField> snapshots;
  SpinorField final_field;
  std::vector<StepDiagnostics> diagnostics;
  StabilityReport stability;
  std::size_t steps = 0;
};

/// Times at which a run evaluates the potentials.
inline std::vector<double> potential_sample_times(const SchemeConfig& cfg) {
  const std::size_t n = cfg.n_steps();
  std::vector<double> times;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.tau;
    switch (cfg.scheme) {
      case Scheme::SemiImplicit4cFD: times.push_back(t); break;
      case Scheme::Implicit4cFD: times.push_back(t + 0.5 * cfg.tau); break;
      case Scheme::TSSPReference:
        times.push_back(t + 0.25 * cfg.tau);
        times.push_back(t + 0.75 * cfg.tau);
        break;
    }
  }
  return times;
}

/// Computes V_max and A_max over the time levels `cfg` will use.
inline void bound_potentials(PotentialSet& pots, const Grid& grid, const SchemeConfig& cfg) {
  if (pots.time_independent) {
    const double t0[1] = {0.0};
    compute_bounds(pots, grid, t0);
  } else {
    compute_bounds(pots, grid, potential_sample_times(cfg));
  }
}

/**
 * Integrates from phi0 to cfg.t_final with the selected scheme.
 *
 * The semi-implicit scheme starts with first_step(), using `dphi0` when
 * given and spectral differentiation of phi0 otherwise, and refuses to run
 * past the stability bound unless cfg.allow_unstable is set.
 */
inline Trajectory run(const SchemeConfig& cfg, const Grid& grid, const SpinorField& phi0,
                      const std::optional<std::vector<SpinorField>>& dphi0, PotentialSet pots) {
  cfg.validate();
  if (!(phi0.grid() == grid)) throw InvalidArgument("initial field is not on the run grid");
  if (pots.A.size() != static_cast<std::size_t>(grid.dim()))
    throw InvalidArgument("potential set dimension does not match grid");
  if (cfg.scheme == Scheme::Implicit4cFD && grid.dim() != 1)
    throw InvalidArgument("the implicit scheme is implemented in 1D only");
  if (!pots.has_bounds()) bound_potentials(pots, grid, cfg);

  Trajectory traj;
  traj.stability = check_stability(cfg, pots);
  if (!traj.stability.ok && !cfg.allow_unstable)
    throw StabilityViolation("tau = " + std::to_string(cfg.tau) + " exceeds the stability bound " +
                                 std::to_string(traj.stability.tau_max),
                             cfg.tau, traj.stability.tau_max);

  const std::size_t n_steps = cfg.n_steps();
  traj.steps = n_steps;
  std::vector<std::size_t> snap_steps;
  for (double t : cfg.snapshot_times) snap_steps.push_back(cfg.step_of(t));
  traj.snapshot_times = cfg.snapshot_times;
  traj.snapshots.resize(cfg.snapshot_times.size());

  std::optional<NodePotentials> static_pots;
  if (pots.time_independent) static_pots = sample_potentials(pots, grid, 0.0);
  const auto pots_at = [&](double t) { return static_pots ? *static_pots : sample_potentials(pots, grid, t); };

  const auto record = [&](std::size_t n, const SpinorField& u) {
    for (std::size_t i = 0; i < snap_steps.size(); ++i)
      if (snap_steps[i] == n) traj.snapshots[i] = u;
    if (cfg.diagnostics) {
      StepDiagnostics d;
      d.n = n;
      d.t = static_cast<double>(n) * cfg.tau;
      d.mass = mass_l2(u);
      if (static_pots) d.energy = discrete_energy(u, *static_pots, cfg.epsilon);
      traj.diagnostics.push_back(d);
    }
  };

  record(0, phi0);
  switch (cfg.scheme) {
    case Scheme::SemiImplicit4cFD: {
      const std::vector<SpinorField> grad = dphi0 ? *dphi0 : spectral_gradient(phi0);
      SpinorField curr = first_step(phi0, grad, pots_at(0.0), cfg);
      record(1, curr);
      const SemiImplicitStepper stepper(grid, cfg.epsilon, cfg.tau);
      ModeSpectrum prev_spec = dft_forward(phi0);
      ModeSpectrum curr_spec = dft_forward(curr);
      for (std::size_t n = 1; n < n_steps; ++n) {
        ModeSpectrum next_spec = stepper.step_spectral(prev_spec, curr, pots_at(static_cast<double>(n) * cfg.tau));
        prev_spec = std::move(curr_spec);
        curr_spec = std::move(next_spec);
        curr = dft_inverse(curr_spec);
        record(n + 1, curr);
      }
      traj.final_field = std::move(curr);
      break;
    }
    case Scheme::Implicit4cFD: {
      ImplicitStepper stepper(grid, cfg.epsilon, cfg.tau, cfg.linear_solver_tol, cfg.linear_solver_max_iter);
      SpinorField curr = phi0;
      for (std::size_t n = 0; n < n_steps; ++n) {
        curr = stepper.step(curr, pots_at((static_cast<double>(n) + 0.5) * cfg.tau));
        record(n + 1, curr);
      }
      traj.final_field = std::move(curr);
      break;
    }
    case Scheme::TSSPReference: {
      const TsspStepper stepper(grid, cfg.epsilon, cfg.tau, pots);
      SpinorField curr = phi0;
      for (std::size_t n = 0; n < n_steps; ++n) {
        stepper.advance(curr, static_cast<double>(n) * cfg.tau);
        record(n + 1, curr);
      }
      traj.final_field = std::move(curr);
      break;
    }
  }
  if (!all_finite(traj.final_field)) throw NonFiniteValue("solution became non-finite");
  return traj;
}

}  // namespace dirac4cfd
