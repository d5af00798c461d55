#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dirac4cfd/dirac4cfd.hpp"
#include "dirac4cfd/oracles.hpp"

using namespace dirac4cfd;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace {

SchemeConfig config(double eps, double tau, double t_final, Scheme s = Scheme::SemiImplicit4cFD) {
  SchemeConfig cfg;
  cfg.epsilon = eps;
  cfg.tau = tau;
  cfg.t_final = t_final;
  cfg.scheme = s;
  return cfg;
}

SpinorField zero_field(const Grid& g) { return SpinorField(g); }

}  // namespace

TEST_CASE("first step of zero data is zero", "[steppers][first-step]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 16, 1);
  const SpinorField z = zero_field(g);
  const SpinorField grad[1] = {z};
  CHECK(max_norm(first_step(z, grad, sample_potentials(p.potentials, g, 0.0), config(1.0, 0.01, 1.0))) == 0.0);
}

TEST_CASE("first step of constant data without potentials", "[steppers][first-step]") {
  const Grid g = build_grid(0.0, 2 * pi, 8, 1);
  const Spinor c{0.3, Complex(0.1, -0.7)};
  const SpinorField u = sample_field([&](const Point&) { return c; }, g);
  const SpinorField grad[1] = {zero_field(g)};
  const double eps = 0.5, tau = 0.02;
  const SpinorField v = first_step(u, grad, sample_potentials(free_potentials(1), g, 0.0), config(eps, tau, 1.0));
  const Spinor expect = c - Complex(0.0, std::sin(tau / eps)) * (pauli::sigma3 * c);
  for (const Spinor& s : v.values()) CHECK(std::sqrt(norm2(s - expect)) < 1e-15);
}

TEST_CASE("first step matches the closed formula at x = pi/4", "[steppers][first-step]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 8, 1);  // node 1 is pi/4
  const SpinorField phi0 = sample_field(p.initial, g);
  const SpinorField grad[1] = {sample_field(p.initial_gradient[0], g)};
  const double tau = 0.01, s = std::sin(tau);
  const SpinorField v = first_step(phi0, grad, sample_potentials(p.potentials, g, 0.0), config(1.0, tau, 1.0));

  // Hand evaluation: phi = (2/3, 1/(3 + r)), phi' = (-4/9, r/(3 + r)^2), V = 2/3, A1 = 1, with r = sqrt(2)/2.
  const double r = std::sqrt(2.0) / 2.0;
  const Complex p1 = 2.0 / 3.0, p2 = 1.0 / (3.0 + r);
  const Complex d1 = -4.0 / 9.0, d2 = r / ((3.0 + r) * (3.0 + r));
  const Complex V = 2.0 / 3.0, A = 1.0, I(0.0, 1.0);
  const Complex e1 = p1 - s * d2 - I * (s * p1 + tau * (V * p1 - A * p2));
  const Complex e2 = p2 - s * d1 - I * (-s * p2 + tau * (V * p2 - A * p1));
  CHECK(std::abs(v[1].c1 - e1) < 1e-15);
  CHECK(std::abs(v[1].c2 - e2) < 1e-15);
}

TEST_CASE("semi-implicit step of zero data without potentials", "[steppers][semi]") {
  const Grid g = build_grid(0.0, 2 * pi, 16, 1);
  const SemiImplicitStepper st(g, 1.0, 0.01);
  const SpinorField z = zero_field(g);
  CHECK(max_norm(st.step(z, z, sample_potentials(free_potentials(1), g, 0.0))) == 0.0);
}

TEST_CASE("semi-implicit step matches the dense solve", "[steppers][semi]") {
  std::mt19937_64 rng(101);
  const Problem p = problems::dirac1d_standard();
  for (std::size_t n : {8u, 16u}) {
    const Grid g = build_grid(p.a, p.b, n, 1);
    const NodePotentials pots = sample_potentials(p.potentials, g, 0.0);
    const SpinorField prev = oracle::random_field(g, rng), curr = oracle::random_field(g, rng);
    const SemiImplicitStepper st(g, 1.0, 0.01);
    CHECK(oracle::max_diff(st.step(prev, curr, pots), oracle::semi_implicit_step(prev, curr, pots, 1.0, 0.01)) < 1e-12);
  }
  const Problem p2 = problems::periodic_em_2d();
  const Grid g2 = build_grid(p2.a, p2.b, 8, 2);
  const NodePotentials pots2 = sample_potentials(p2.potentials, g2, 0.0);
  const SpinorField prev = oracle::random_field(g2, rng), curr = oracle::random_field(g2, rng);
  const SemiImplicitStepper st2(g2, 0.5, 0.02);
  CHECK(oracle::max_diff(st2.step(prev, curr, pots2), oracle::semi_implicit_step(prev, curr, pots2, 0.5, 0.02)) <
        1e-12);
}

TEST_CASE("semi-implicit free step keeps a single mode", "[steppers][semi]") {
  const Grid g = build_grid(0.0, 2 * pi, 16, 1);
  const SpinorField w3 = sample_field(
      [](const Point& x) { return Spinor{std::polar(1.0, 3 * x[0]), std::polar(0.5, 3 * x[0])}; }, g);
  const ModeSpectrum s = dft_forward(SemiImplicitStepper(g, 0.7, 0.05).step(w3, w3, sample_potentials(free_potentials(1), g, 0.0)));
  for (std::size_t k = 0; k < s.size(); ++k)
    if (g.mode_index(k) != 3) CHECK(std::sqrt(norm2(s[k])) < 1e-14);
}

TEST_CASE("semi-implicit scheme is time symmetric", "[steppers][semi]") {
  std::mt19937_64 rng(202);
  for (const Problem& p : {problems::dirac1d_standard(), problems::periodic_em_2d()}) {
    const Grid g = build_grid(p.a, p.b, p.dim == 1 ? 64 : 16, p.dim);
    const NodePotentials pots = sample_potentials(p.potentials, g, 0.0);
    const SpinorField prev = oracle::random_field(g, rng), curr = oracle::random_field(g, rng);
    const SpinorField next = SemiImplicitStepper(g, 0.5, 0.01).step(prev, curr, pots);
    const SpinorField back = SemiImplicitStepper(g, 0.5, -0.01).step(next, curr, pots);
    CHECK(oracle::max_diff(back, prev) < 1e-11);
  }
}

TEST_CASE("mode matrices stay invertible", "[steppers][semi]") {
  for (double eps : {1.0, 1e-3})
    for (double tau : {1e-6, 1.0, 100.0}) CHECK_NOTHROW(SemiImplicitStepper(build_grid(0, 2 * pi, 32, 2), eps, tau));
}

TEST_CASE("implicit step basics", "[steppers][implicit]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 32, 1);
  const NodePotentials pots = sample_potentials(p.potentials, g, 0.005);
  ImplicitStepper st(g, 1.0, 0.01);
  CHECK(max_norm(st.step(zero_field(g), pots)) == 0.0);

  const SpinorField u = sample_field(p.initial, g);
  const SpinorField v = st.step(u, pots);
  CHECK(std::abs(mass_l2(v) - mass_l2(u)) <= 1e-12 * mass_l2(u));
  CHECK(!st.last_residuals().empty());
  CHECK(st.last_residuals().back() <= 1e-12);

  CHECK_THROWS_AS(ImplicitStepper(build_grid(0, 1, 8, 2), 1.0, 0.01), InvalidArgument);
}

TEST_CASE("implicit step matches the dense solve", "[steppers][implicit]") {
  std::mt19937_64 rng(303);
  const Problem p = problems::dirac1d_standard();
  for (std::size_t n : {8u, 16u}) {
    const Grid g = build_grid(p.a, p.b, n, 1);
    const NodePotentials pots = sample_potentials(p.potentials, g, 0.05);
    const SpinorField u = oracle::random_field(g, rng);
    ImplicitStepper st(g, 0.5, 0.1, 1e-12);
    CHECK(oracle::max_diff(st.step(u, pots), oracle::implicit_step(u, pots, 0.5, 0.1)) < 1e-11);
  }
}

TEST_CASE("implicit solver failure carries the residual history", "[steppers][implicit]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 16, 1);
  ImplicitStepper st(g, 1.0, 0.1, 1e-15, 2);
  try {
    (void)st.step(sample_field(p.initial, g), sample_potentials(p.potentials, g, 0.05));
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.residuals().size() == 2);
    CHECK(e.residuals()[1] < e.residuals()[0]);
  }
}

TEST_CASE("implicit scheme conserves mass and energy", "[steppers][implicit]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 64, 1);
  for (double eps : {1.0, 0.0625}) {
    SchemeConfig cfg = config(eps, 0.01, 2.0, Scheme::Implicit4cFD);
    cfg.diagnostics = true;
    const Trajectory tr = run(cfg, g, sample_field(p.initial, g), std::nullopt, p.potentials);
    REQUIRE(tr.diagnostics.size() == 201);
    const double m0 = tr.diagnostics.front().mass, e0 = *tr.diagnostics.front().energy;
    for (const auto& d : tr.diagnostics) {
      CHECK(std::abs(d.mass - m0) <= 1e-10 * m0);
      CHECK(std::abs(*d.energy - e0) <= 1e-8 * std::abs(e0));
    }
  }
}

TEST_CASE("stability report", "[steppers][stability]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 64, 1);
  PotentialSet pots = p.potentials;
  const double t0[1] = {0.0};
  compute_bounds(pots, g, t0);

  const StabilityReport semi = check_stability(config(1.0, 0.45, 1.8), pots);
  CHECK(semi.tau_max == Approx(0.5));
  CHECK(semi.ok);
  CHECK_FALSE(check_stability(config(1.0, 0.6, 1.8), pots).ok);
  CHECK(check_stability(config(1.0, 10.0, 10.0, Scheme::Implicit4cFD), pots).ok);

  PotentialSet free = free_potentials(1);
  compute_bounds(free, g, t0);
  CHECK(std::isinf(check_stability(config(1.0, 10.0, 10.0), free).tau_max));
  CHECK_THROWS_AS(check_stability(config(1.0, 0.1, 1.0), p.potentials), InvalidArgument);
}

TEST_CASE("run enforces the stability gate", "[steppers][run]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 32, 1);
  const SpinorField u = sample_field(p.initial, g);
  SchemeConfig cfg = config(1.0, 0.6, 1.8);
  try {
    (void)run(cfg, g, u, std::nullopt, p.potentials);
    FAIL("expected StabilityViolation");
  } catch (const StabilityViolation& e) {
    CHECK(e.tau() == 0.6);
    CHECK(e.tau_max() == Approx(0.5));
  }
  cfg.allow_unstable = true;
  const Trajectory tr = run(cfg, g, u, std::nullopt, p.potentials);
  CHECK_FALSE(tr.stability.ok);
  CHECK(tr.steps == 3);
}

TEST_CASE("run takes exactly one step when t_final equals tau", "[steppers][run]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 32, 1);
  for (Scheme s : {Scheme::SemiImplicit4cFD, Scheme::Implicit4cFD, Scheme::TSSPReference}) {
    SchemeConfig cfg = config(1.0, 0.01, 0.01, s);
    cfg.diagnostics = true;
    const Trajectory tr = run(cfg, g, sample_field(p.initial, g), std::nullopt, p.potentials);
    CHECK(tr.steps == 1);
    CHECK(tr.diagnostics.size() == 2);
  }
  CHECK_THROWS_AS(run(config(1.0, 0.01, 0.01, Scheme::Implicit4cFD), build_grid(0, 2 * pi, 8, 2),
                      SpinorField(build_grid(0, 2 * pi, 8, 2)), std::nullopt, free_potentials(2)),
                  InvalidArgument);
}

TEST_CASE("snapshots are recorded at requested times", "[steppers][run]") {
  const Problem p = problems::dirac1d_standard();
  const Grid g = build_grid(p.a, p.b, 32, 1);
  SchemeConfig cfg = config(1.0, 0.01, 0.1);
  cfg.snapshot_times = {0.0, 0.05, 0.1};
  const SpinorField u = sample_field(p.initial, g);
  const Trajectory tr = run(cfg, g, u, std::nullopt, p.potentials);
  CHECK(oracle::max_diff(tr.snapshots[0], u) == 0.0);
  CHECK(oracle::max_diff(tr.snapshots[2], tr.final_field) == 0.0);
}

TEST_CASE("amplification factor", "[steppers][amplification]") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> U(0.01, 1.0), P(-3.0, 3.0);
  std::uniform_int_distribution<long> L(-64, 63);
  for (int i = 0; i < 10000; ++i) {
    const double h = 2 * pi / 128;
    const Complex eta = amplification_factor(2 * pi * static_cast<double>(L(rng)) / 128, i % 2 ? 1 : -1, h, U(rng),
                                             U(rng), P(rng), P(rng));
    CHECK(std::abs(std::abs(eta) - 1.0) <= 1e-13);
  }
  CHECK(std::abs(amplification_factor(1.0, 1, 0.1, 0.5, 1e-12, 0.3, 0.2) - 1.0) < 1e-10);
  for (int sign : {1, -1}) {
    const double tau = 0.3, th = sign;
    const Complex expect = (2.0 + Complex(0.0, tau * th)) / (2.0 - Complex(0.0, tau * th));
    CHECK(std::abs(amplification_factor(0.0, sign, 1.0, 1.0, tau, 0.0, 0.0) - expect) < 1e-15);
  }
  const Grid g = build_grid(0.0, 2 * pi, 16, 1);
  const SchemeConfig cfg = config(0.5, 0.1, 1.0);
  CHECK(std::abs(amplification_factor(3, 1, g, cfg, 0.2, 0.1) -
                 amplification_factor(3 * g.h(), 1, g.h(), 0.5, 0.1, 0.2, 0.1)) == 0.0);
}
