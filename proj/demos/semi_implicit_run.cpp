// Integrates the 1D standard problem with the semi-implicit scheme and
// compares against a splitting reference on a finer grid.

#include <cstdio>
#include <numbers>

#include "dirac4cfd/dirac4cfd.hpp"

int main() {
  using namespace dirac4cfd;
  const Problem p = problems::dirac1d_standard();
  const double pi = std::numbers::pi;

  SchemeConfig cfg;
  cfg.epsilon = 1.0;
  cfg.tau = 1e-3;
  cfg.t_final = 1.0;
  cfg.scheme = Scheme::SemiImplicit4cFD;

  const Grid grid = build_grid_with_h(p.a, p.b, pi / 32, 1);
  const Trajectory traj = run(cfg, grid, sample_field(p.initial, grid), std::nullopt, p.potentials);

  const Grid fine = build_grid_with_h(p.a, p.b, pi / 128, 1);
  const double times[1] = {cfg.t_final};
  const SpinorField ref = compute_reference(fine, cfg.epsilon, 1e-4, p.initial, p.potentials, times).front();

  const ErrorTriple e = error_triple(traj.final_field, restrict_to(ref, grid), cfg.epsilon);
  std::printf("steps %zu, tau_max %.3f\n", traj.steps, traj.stability.tau_max);
  std::printf("e_phi %.3e  e_rho %.3e  e_J %.3e\n", e.e_phi, e.e_rho, e.e_J);
  std::printf("mass %.12f -> %.12f\n", mass_l2(sample_field(p.initial, grid)), mass_l2(traj.final_field));
}
