#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirac4cfd/config.hpp"
#include "dirac4cfd/error.hpp"
#include "dirac4cfd/harness/expr.hpp"

namespace dirac4cfd::harness {

enum class Command { ConvergeSpace, ConvergeTime, Conserve, Dynamics2D, OracleCheck, Solve };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::ConvergeSpace: return "converge-space";
    case Command::ConvergeTime: return "converge-time";
    case Command::Conserve: return "conserve";
    case Command::Dynamics2D: return "dynamics2d";
    case Command::OracleCheck: return "oracle-check";
    case Command::Solve: return "solve";
  }
  return "?";
}

/// Fine-grid splitting reference used as "exact" solution.
struct ReferenceSettings {
  double h = std::numbers::pi / 256.0;
  double tau = 1e-5;
  /// Compare against a second reference at (h/2, tau/2) before use.
  bool gate = true;
  double gate_tol = 1e-7;
};

/// Everything one harness command needs; serialized verbatim into the run manifest.
struct ExperimentSpec {
  Command command = Command::Solve;
  std::string preset = "dirac1d-standard";
  Scheme scheme = Scheme::SemiImplicit4cFD;
  std::vector<double> epsilons{1.0};
  /// Swept resolutions (h for space sweeps, tau for time sweeps), coarse to fine.
  std::vector<double> resolutions;
  /// Fixed non-swept resolution; empty selects the command default.
  std::optional<double> companion;
  /// Mesh size and step of single runs (solve, conserve, dynamics2d).
  std::optional<double> h;
  std::optional<double> tau;
  double t_final = 2.0;
  ReferenceSettings reference;
  std::string out_dir = "out";
  std::uint64_t seed = 20240601;
  bool allow_unstable = false;
  std::vector<double> snapshot_times;
  double linear_solver_tol = 1e-12;
  int linear_solver_max_iter = 200;
  /// Density level defining the support in dynamics2d.
  double support_threshold = 1e-3;
  /// Diagonal highlight: resolution = anchor * eps^exponent.
  double diagonal_anchor = 0.0;
  double diagonal_exponent = 0.0;
  bool diagnostics = false;
  /// solve: also measure errors against the splitting reference (1D presets).
  bool compare_reference = false;
};

inline ExperimentSpec defaults_for(Command c) {
  ExperimentSpec s;
  s.command = c;
  const double pi = std::numbers::pi;
  switch (c) {
    case Command::ConvergeSpace:
      s.epsilons = {1.0, std::pow(2.0, -4.0)};
      s.resolutions = {pi / 16, pi / 32, pi / 64, pi / 128};
      s.diagonal_anchor = pi / 32;
      s.diagonal_exponent = 0.25;
      break;
    case Command::ConvergeTime:
      s.epsilons = {1.0, std::pow(2.0, -2.0 / 3), std::pow(2.0, -4.0 / 3), std::pow(2.0, -2.0),
                    std::pow(2.0, -8.0 / 3), std::pow(2.0, -10.0 / 3)};
      for (int k = 0; k <= 6; ++k) s.resolutions.push_back(0.05 / std::ldexp(1.0, k));
      s.diagonal_anchor = 0.05;
      s.diagonal_exponent = 1.5;
      break;
    case Command::Conserve:
      s.scheme = Scheme::Implicit4cFD;
      s.epsilons = {1.0, 0.25, std::pow(2.0, -4.0)};
      s.h = pi / 64;
      s.tau = 0.01;
      s.diagnostics = true;
      break;
    case Command::Dynamics2D:
      s.preset = "honeycomb-2d";
      s.epsilons = {1.0, 0.5, 0.25};
      s.tau = 0.01;
      s.t_final = 2.0;
      s.snapshot_times = {0.0, 0.5, 1.0, 1.5, 2.0};
      break;
    case Command::OracleCheck:
      break;
    case Command::Solve:
      s.h = pi / 64;
      s.tau = 1e-3;
      break;
  }
  return s;
}

/// Desk-scale 2D mesh sizes per preset.
inline double default_h_2d(std::string_view preset) {
  if (preset == "honeycomb-2d") return 1.0 / 8.0;
  if (preset == "periodic-em-2d") return std::numbers::pi / 128.0;
  throw InvalidArgument("no 2D default mesh for preset '" + std::string(preset) + "'");
}

/// Companion tau for a space sweep: 1e-4 eps^{3/2}, shrunk so t_final / tau is integral.
inline double default_space_companion_tau(double eps, double t_final) {
  const double target = 1e-4 * std::pow(eps, 1.5);
  const double steps = std::ceil(t_final / target * (1.0 - 1e-12));
  return t_final / steps;
}

inline void validate_halving(const std::vector<double>& res) {
  if (res.empty()) throw InvalidArgument("resolution list is empty");
  for (std::size_t k = 0; k + 1 < res.size(); ++k) {
    const double ratio = res[k] / res[k + 1];
    if (std::abs(ratio - 2.0) > 1e-9 * 2.0)
      throw InvalidArgument("resolutions must decrease by exact factors of 2");
  }
}

namespace detail {

inline double json_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>());
  throw InvalidArgument("expected a number or numeric expression, got " + j.dump());
}

// null clears the value, so a manifest's spec block reads back unchanged.
inline std::optional<double> json_optional(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return json_number(j);
}

inline std::vector<double> json_numbers(const nlohmann::json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(json_number(e));
  } else if (j.is_string()) {
    out = parse_list(j.get<std::string>());
  } else {
    out.push_back(json_number(j));
  }
  return out;
}

}  // namespace detail

/**
 * Applies a JSON configuration on top of `spec`. Recognized keys:
 * preset, scheme, epsilon, resolutions, companion, h, tau, t_final,
 * snapshot_times, seed, allow_unstable, diagnostics, compare_reference, support_threshold,
 * reference {h, tau, gate, gate_tol}, solver {tol, max_iter}, output {dir},
 * diagonal {anchor, exponent}. Numbers may be given as expressions ("pi/16").
 */
inline void apply_json(ExperimentSpec& spec, const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") continue;
    else if (key == "preset") spec.preset = value.get<std::string>();
    else if (key == "scheme") spec.scheme = parse_scheme(value.get<std::string>());
    else if (key == "epsilon" || key == "epsilons") spec.epsilons = detail::json_numbers(value);
    else if (key == "resolutions") spec.resolutions = detail::json_numbers(value);
    else if (key == "companion") spec.companion = detail::json_optional(value);
    else if (key == "h") spec.h = detail::json_optional(value);
    else if (key == "tau") spec.tau = detail::json_optional(value);
    else if (key == "t_final") spec.t_final = detail::json_number(value);
    else if (key == "snapshot_times") spec.snapshot_times = detail::json_numbers(value);
    else if (key == "seed") spec.seed = value.get<std::uint64_t>();
    else if (key == "allow_unstable") spec.allow_unstable = value.get<bool>();
    else if (key == "diagnostics") spec.diagnostics = value.get<bool>();
    else if (key == "compare_reference") spec.compare_reference = value.get<bool>();
    else if (key == "support_threshold") spec.support_threshold = detail::json_number(value);
    else if (key == "reference") {
      for (const auto& [rk, rv] : value.items()) {
        if (rk == "h") spec.reference.h = detail::json_number(rv);
        else if (rk == "tau") spec.reference.tau = detail::json_number(rv);
        else if (rk == "gate") spec.reference.gate = rv.get<bool>();
        else if (rk == "gate_tol") spec.reference.gate_tol = detail::json_number(rv);
        else throw InvalidArgument("unknown key reference." + rk);
      }
    } else if (key == "solver") {
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "tol") spec.linear_solver_tol = detail::json_number(sv);
        else if (sk == "max_iter") spec.linear_solver_max_iter = sv.get<int>();
        else throw InvalidArgument("unknown key solver." + sk);
      }
    } else if (key == "output") {
      for (const auto& [ok, ov] : value.items()) {
        if (ok == "dir") spec.out_dir = ov.get<std::string>();
        else throw InvalidArgument("unknown key output." + ok);
      }
    } else if (key == "diagonal") {
      for (const auto& [dk, dv] : value.items()) {
        if (dk == "anchor") spec.diagonal_anchor = detail::json_number(dv);
        else if (dk == "exponent") spec.diagonal_exponent = detail::json_number(dv);
        else throw InvalidArgument("unknown key diagonal." + dk);
      }
    } else {
      throw InvalidArgument("unknown configuration key '" + key + "'");
    }
  }
}

inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["command"] = std::string(to_string(s.command));
  j["preset"] = s.preset;
  j["scheme"] = std::string(to_string(s.scheme));
  j["epsilon"] = s.epsilons;
  j["resolutions"] = s.resolutions;
  j["companion"] = s.companion ? nlohmann::json(*s.companion) : nlohmann::json(nullptr);
  j["h"] = s.h ? nlohmann::json(*s.h) : nlohmann::json(nullptr);
  j["tau"] = s.tau ? nlohmann::json(*s.tau) : nlohmann::json(nullptr);
  j["t_final"] = s.t_final;
  j["snapshot_times"] = s.snapshot_times;
  j["seed"] = s.seed;
  j["allow_unstable"] = s.allow_unstable;
  j["diagnostics"] = s.diagnostics;
  j["compare_reference"] = s.compare_reference;
  j["support_threshold"] = s.support_threshold;
  j["reference"] = {{"h", s.reference.h}, {"tau", s.reference.tau}, {"gate", s.reference.gate},
                    {"gate_tol", s.reference.gate_tol}};
  j["solver"] = {{"tol", s.linear_solver_tol}, {"max_iter", s.linear_solver_max_iter}};
  j["output"] = {{"dir", s.out_dir}};
  j["diagonal"] = {{"anchor", s.diagonal_anchor}, {"exponent", s.diagonal_exponent}};
  return j;
}

/// Sweep parallelism: DIRAC4CFD_THREADS if set, else the hardware concurrency.
inline unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DIRAC4CFD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

}  // namespace dirac4cfd::harness
