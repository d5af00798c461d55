#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirac4cfd/dirac4cfd.hpp"
#include "dirac4cfd/oracles.hpp"

namespace dirac4cfd::harness {

struct OracleResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct OracleReport {
  std::uint64_t seed = 0;
  std::vector<OracleResult> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleResult& c) { return c.passed; });
  }

  const OracleResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["passed"] = all_passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name},
                             {"max_error", c.max_error},
                             {"tolerance", c.tolerance},
                             {"passed", c.passed},
                             {"note", c.note}});
    return j;
  }
};

namespace detail {

// Runs body(rng) and records the largest error it returns; exceptions fail the check.
template <class Body>
OracleResult oracle_case(const std::string& name, double tol, std::uint64_t seed, Body&& body) {
  OracleResult r;
  r.name = name;
  r.tolerance = tol;
  std::mt19937_64 rng(seed);
  try {
    r.max_error = body(rng);
    r.passed = r.max_error <= tol;
  } catch (const std::exception& e) {
    r.max_error = std::numeric_limits<double>::infinity();
    r.note = e.what();
  }
  return r;
}

inline Grid oracle_grid(const Problem& p, std::size_t n) { return build_grid(p.a, p.b, n, p.dim); }

}  // namespace detail

/**
 * Cross-checks the Fourier-space machinery against dense and closed-form
 * oracles. `gamma_fn` replaces the A_h symbol inside the semi-implicit
 * stepper, which lets tests confirm that a corrupted symbol is caught.
 */
inline OracleReport oracle_check(std::uint64_t seed,
                                 const SemiImplicitStepper::GammaFn& gamma_fn = gamma_symbol) {
  OracleReport rep;
  rep.seed = seed;
  const Problem p1 = problems::dirac1d_standard();
  const Problem p2 = problems::periodic_em_2d();
  constexpr int kStates = 100;

  const auto draw_eps_tau = [](std::mt19937_64& rng) {
    const double eps_choices[3] = {1.0, 0.5, 0.25};
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_real_distribution<double> tau(1e-3, 0.1);
    const double eps = eps_choices[pick(rng)];
    return std::pair<double, double>{eps, tau(rng)};
  };

  const auto semi_dense = [&](const Problem& p, std::size_t n, int states) {
    return [&gamma_fn, &draw_eps_tau, pp = &p, n, states](std::mt19937_64& rng) {
      const Grid g = detail::oracle_grid(*pp, n);
      const NodePotentials pots = sample_potentials(pp->potentials, g, 0.0);
      double worst = 0.0;
      for (int s = 0; s < states; ++s) {
        const auto [eps, tau] = draw_eps_tau(rng);
        const SpinorField prev = oracle::random_field(g, rng);
        const SpinorField curr = oracle::random_field(g, rng);
        const SemiImplicitStepper stepper(g, eps, tau, gamma_fn);
        worst = std::max(worst, oracle::max_diff(stepper.step(prev, curr, pots),
                                                 oracle::semi_implicit_step(prev, curr, pots, eps, tau)));
      }
      return worst;
    };
  };

  std::uint64_t stream = seed;
  for (std::size_t n : {8u, 16u})
    rep.checks.push_back(detail::oracle_case("semi_implicit_dense_1d_N" + std::to_string(n), 1e-12, stream++,
                                             semi_dense(p1, n, kStates)));
  rep.checks.push_back(
      detail::oracle_case("semi_implicit_dense_2d_N8", 1e-12, stream++, semi_dense(p2, 8, 20)));

  for (std::size_t n : {8u, 16u})
    rep.checks.push_back(detail::oracle_case(
        "implicit_dense_1d_N" + std::to_string(n), 1e-10, stream++, [&, n](std::mt19937_64& rng) {
          const Grid g = detail::oracle_grid(p1, n);
          double worst = 0.0;
          for (int s = 0; s < kStates; ++s) {
            const auto [eps, tau] = draw_eps_tau(rng);
            const NodePotentials pots = sample_potentials(p1.potentials, g, 0.5 * tau);
            const SpinorField curr = oracle::random_field(g, rng);
            ImplicitStepper stepper(g, eps, tau, 1e-13, 200);
            worst = std::max(worst, oracle::max_diff(stepper.step(curr, pots),
                                                     oracle::implicit_step(curr, pots, eps, tau)));
          }
          return worst;
        }));

  rep.checks.push_back(detail::oracle_case("parseval_and_direct_dft", 1e-12, stream++, [&](std::mt19937_64& rng) {
    double worst = 0.0;
    for (std::size_t n : {8u, 16u, 64u}) {
      const Grid g = detail::oracle_grid(p1, n);
      const SpinorField u = oracle::random_field(g, rng);
      const ModeSpectrum s = dft_forward(u);
      double spec2 = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) spec2 += norm2(s[k]);
      const double phys = l2_norm_squared(u);
      worst = std::max(worst, std::abs(g.length() * spec2 - phys) / phys);
      worst = std::max(worst, oracle::max_diff(dft_inverse(s), u));
      const auto direct = oracle::direct_dft(u);
      for (std::size_t k = 0; k < n; ++k) {
        const Spinor d = direct[k] - s[k];
        worst = std::max({worst, std::abs(d.c1), std::abs(d.c2)});
      }
    }
    const Grid g2 = detail::oracle_grid(p2, 8);
    const SpinorField u2 = oracle::random_field(g2, rng);
    const ModeSpectrum s2 = dft_forward(u2);
    double spec2 = 0.0;
    for (std::size_t k = 0; k < s2.size(); ++k) spec2 += norm2(s2[k]);
    const double phys = l2_norm_squared(u2);
    worst = std::max(worst, std::abs(g2.length() * g2.length() * spec2 - phys) / phys);
    return worst;
  }));

  rep.checks.push_back(detail::oracle_case("propagator_unitarity", 1e-12, stream++, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mu(-20.0, 20.0), eps(0.1, 1.0), dt(1e-4, 0.1), v(-2.0, 2.0);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const double m[2] = {mu(rng), mu(rng)};
      const double e = eps(rng), d = dt(rng);
      const Mat2 free = free_propagator_mode(m, e, d);
      const Mat2 gen = pauli::combine(0.0, m[0], m[1], 1.0) * Complex(0.0, -d / e);
      worst = std::max(worst, max_abs(free - oracle::expm(gen)));
      worst = std::max(worst, max_abs(free.adjoint() * free - pauli::identity));
      const double a[2] = {v(rng), v(rng)};
      const double V = v(rng);
      const Mat2 pot = potential_propagator_point(V, a, d);
      const Mat2 pgen = pauli::combine(V, -a[0], -a[1], 0.0) * Complex(0.0, -d);
      worst = std::max(worst, max_abs(pot - oracle::expm(pgen)));
      worst = std::max(worst, max_abs(pot.adjoint() * pot - pauli::identity));
    }
    return worst;
  }));

  rep.checks.push_back(detail::oracle_case("amplification_modulus", 1e-13, stream++, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> eps(0.01, 1.0), tau(1e-5, 1.0), pot(-3.0, 3.0);
    std::uniform_int_distribution<int> logn(3, 10);
    std::uniform_int_distribution<int> sign(0, 1);
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const std::size_t n = std::size_t{1} << logn(rng);
      const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
      std::uniform_int_distribution<long> mode(-static_cast<long>(n / 2), static_cast<long>(n / 2) - 1);
      const double mu_h = 2.0 * std::numbers::pi * static_cast<double>(mode(rng)) / static_cast<double>(n);
      const Complex eta =
          amplification_factor(mu_h, sign(rng) ? 1 : -1, h, eps(rng), tau(rng), pot(rng), pot(rng));
      worst = std::max(worst, std::abs(std::abs(eta) - 1.0));
    }
    return worst;
  }));

  rep.checks.push_back(detail::oracle_case("energy_dense", 1e-13, stream++, [&](std::mt19937_64& rng) {
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      for (const Problem* p : {&p1, &p2}) {
        const Grid g = detail::oracle_grid(*p, p->dim == 1 ? 16 : 8);
        const NodePotentials pots = sample_potentials(p->potentials, g, 0.0);
        const SpinorField u = oracle::random_field(g, rng);
        const double eps = draw_eps_tau(rng).first;
        const double ref = oracle::energy(u, pots, eps);
        worst = std::max(worst, std::abs(discrete_energy(u, pots, eps) - ref) / std::max(1.0, std::abs(ref)));
      }
    }
    return worst;
  }));

  return rep;
}

}  // namespace dirac4cfd::harness
