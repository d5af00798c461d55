#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "dirac4cfd/dirac4cfd.hpp"
#include "dirac4cfd/oracles.hpp"

using namespace dirac4cfd;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

TEST_CASE("free propagator closed form", "[tssp]") {
  const double mu0[1] = {0.0};
  CHECK(max_abs(free_propagator_mode(mu0, 1.0, 0.0) - pauli::identity) == 0.0);
  CHECK(max_abs(free_propagator_mode(mu0, 1.0, pi) + pauli::identity) < 1e-15);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mu(-30.0, 30.0), eps(0.05, 1.0), dt(0.0, 0.05);
  for (int i = 0; i < 500; ++i) {
    const double m[2] = {mu(rng), mu(rng)};
    const double e = eps(rng), d = dt(rng);
    const Mat2 u = free_propagator_mode(m, e, d);
    CHECK(max_abs(u - oracle::expm(pauli::combine(0.0, m[0], m[1], 1.0) * Complex(0.0, -d / e))) < 1e-12);
    CHECK(is_unitary(u));
    const Mat2 u1 = free_propagator_mode(std::span<const double>(m, 1), e, d);
    CHECK(max_abs(u1 - oracle::expm(pauli::combine(0.0, m[0], 0.0, 1.0) * Complex(0.0, -d / e))) < 1e-12);
  }
}

TEST_CASE("potential propagator closed form", "[tssp]") {
  const double a0[2] = {0.0, 0.0};
  CHECK(max_abs(potential_propagator_point(0.0, a0, 0.3) - pauli::identity) == 0.0);
  CHECK(max_abs(potential_propagator_point(1.0, a0, pi) + pauli::identity) < 1e-15);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> v(-3.0, 3.0), dt(0.0, 0.5);
  for (int i = 0; i < 500; ++i) {
    const double a[2] = {v(rng), v(rng)};
    const double V = v(rng), d = dt(rng);
    const Mat2 u = potential_propagator_point(V, a, d);
    CHECK(max_abs(u - oracle::expm(pauli::combine(V, -a[0], -a[1], 0.0) * Complex(0.0, -d))) < 1e-12);
    CHECK(is_unitary(u));
  }
}

TEST_CASE("splitting step without potentials is the free flow", "[tssp]") {
  const Grid g = build_grid(0.0, 2 * pi, 16, 1);
  const SpinorField w = sample_field([](const Point& x) { return Spinor{std::polar(1.0, 2 * x[0]), 0.3}; }, g);
  const double eps = 0.5, dt = 0.07;
  const SpinorField v = tssp_step(w, free_potentials(1), 0.0, eps, dt);
  const double mu[1] = {2.0};
  const Mat2 u2 = free_propagator_mode(mu, eps, dt);
  const double mu0[1] = {0.0};
  const Mat2 u0 = free_propagator_mode(mu0, eps, dt);
  const ModeSpectrum s = dft_forward(v);
  CHECK(std::sqrt(norm2(s.coefficient(2) - u2 * Spinor{1.0, 0.0})) < 1e-14);
  CHECK(std::sqrt(norm2(s.coefficient(0) - u0 * Spinor{0.0, 0.3})) < 1e-14);
}

TEST_CASE("constant potentials: local error is third order", "[tssp]") {
  const Grid g = build_grid(0.0, 2 * pi, 8, 1);
  PotentialSet pots = free_potentials(1);
  const double V = 0.7, A = -0.4, eps = 0.8;
  pots.V = [=](double, const Point&) { return V; };
  pots.A = {[=](double, const Point&) { return A; }};
  const SpinorField w = sample_field([](const Point& x) { return Spinor{std::polar(1.0, x[0]), 0.5}; }, g);
  // Full constant matrix on mode 1: (1/eps)(sigma1 + sigma3) + V - A sigma1.
  std::vector<double> errs;
  for (double dt : {0.1, 0.05, 0.025}) {
    const Mat2 full = pauli::combine(V, 1.0 / eps - A, 0.0, 1.0 / eps) * Complex(0.0, -dt);
    const SpinorField v = tssp_step(w, pots, 0.0, eps, dt);
    const Spinor exact = oracle::expm(full) * Spinor{1.0, 0.0};
    errs.push_back(std::sqrt(norm2(dft_forward(v).coefficient(1) - exact)));
  }
  for (const auto& o : convergence_order(errs)) {
    REQUIRE(o);
    CHECK(*o == Approx(3.0).margin(0.2));
  }
}

TEST_CASE("splitting steps are unitary", "[tssp]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 16, 1);
  SpinorField u = sample_field(p.initial, g);
  const double m0 = mass_l2(u);
  const TsspStepper st(g, 0.5, 1e-3, p.potentials);
  st.advance(u, 0.0);
  CHECK(std::abs(mass_l2(u) - m0) <= 1e-13 * m0);
  for (int n = 1; n < 100000; ++n) st.advance(u, n * 1e-3);
  // Only rounding accumulates: about one ulp per step at worst.
  CHECK(std::abs(mass_l2(u) - m0) <= 1e5 * 1e-15 * m0);
}

TEST_CASE("splitting is second order in time", "[tssp]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 64, 1);
  const double times[1] = {0.5};
  std::vector<SpinorField> sols;
  for (double dt : {0.01, 0.005, 0.0025})
    sols.push_back(compute_reference(g, 1.0, dt, p.initial, p.potentials, times).front());
  const double d1 = relative_error(sols[0], sols[1], Quantity::Phi, 1.0);
  const double d2 = relative_error(sols[1], sols[2], Quantity::Phi, 1.0);
  const double order = std::log2(d1 / d2);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("splitting is spectrally accurate in space", "[tssp]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g256 = build_grid(p.a, p.b, 256, 1);
  const Grid g512 = build_grid(p.a, p.b, 512, 1);
  const double times[1] = {0.5};
  const SpinorField a = compute_reference(g256, 1.0, 1e-3, p.initial, p.potentials, times).front();
  const SpinorField b = compute_reference(g512, 1.0, 1e-3, p.initial, p.potentials, times).front();
  CHECK(relative_error(a, restrict_to(b, g256), Quantity::Phi, 1.0) <= 1e-10);
}

TEST_CASE("reference trajectory", "[tssp]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 64, 1);
  const double t0[1] = {0.0};
  CHECK(oracle::max_diff(compute_reference(g, 1.0, 1e-3, p.initial, p.potentials, t0).front(),
                         sample_field(p.initial, g)) == 0.0);

  const double ts[2] = {0.5, 1.0};
  const auto out = compute_reference(g, 1.0, 1e-3, p.initial, p.potentials, ts);
  const double m0 = mass_l2(sample_field(p.initial, g));
  for (const auto& u : out) CHECK(std::abs(mass_l2(u) - m0) <= 1e-12 * m0);

  const Grid bad[1] = {build_grid(p.a, p.b, 24, 1)};
  CHECK_THROWS_AS(compute_reference(g, 1.0, 1e-3, p.initial, p.potentials, ts, bad), InvalidArgument);
  const Grid good[1] = {build_grid(p.a, p.b, 16, 1)};
  CHECK_NOTHROW(compute_reference(g, 1.0, 1e-3, p.initial, p.potentials, t0, good));
}

TEST_CASE("free evolution conserves total density", "[tssp][observables]") {
  const Problem p = problems::periodic_em_2d();
  const Grid g = build_grid(p.a, p.b, 32, 2);
  SpinorField u = sample_field(p.initial, g);
  const auto rho_sum = [&](const SpinorField& f) {
    double s = 0.0;
    for (double r : total_density(f)) s += r;
    return s * g.cell_volume();
  };
  const double m0 = rho_sum(u);
  const TsspStepper st(g, 0.5, 0.01, free_potentials(2));
  for (int n = 0; n < 100; ++n) st.advance(u, n * 0.01);
  CHECK(std::abs(rho_sum(u) - m0) <= 1e-12 * m0);
}
