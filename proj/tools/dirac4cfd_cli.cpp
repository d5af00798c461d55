// dirac4cfd command-line front end.
//
// Exit codes: 0 success, 1 runtime error, 2 bad arguments or configuration,
// 3 stability refusal, 4 reference gate failure, 5 oracle-check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dirac4cfd/harness/commands.hpp"
#include "dirac4cfd/harness/oracle_check.hpp"

namespace h = dirac4cfd::harness;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::string scheme;
  std::string epsilon;
  std::string h;
  std::string tau;
  std::string tfinal;
  std::string out;
  std::string snapshots;
  std::optional<std::uint64_t> seed;
  bool allow_unstable = false;
  bool compare = false;
  bool no_gate = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--preset", f.preset, "dirac1d-standard | honeycomb-2d | periodic-em-2d");
  sub->add_option("--scheme", f.scheme, "implicit | semi | tssp");
  sub->add_option("--epsilon", f.epsilon, "epsilon value(s), comma separated; expressions like 2^-4 allowed");
  sub->add_option("--h", f.h, "mesh size(s); the swept axis for converge-space, else a single value");
  sub->add_option("--tau", f.tau, "time step(s); the swept axis for converge-time, else a single value");
  sub->add_option("--tfinal", f.tfinal, "final time");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--seed", f.seed, "RNG seed for randomized checks");
  sub->add_flag("--allow-unstable", f.allow_unstable, "run past the stability bound (prints a warning)");
  sub->add_option("--snapshot-times", f.snapshots, "comma separated output times");
  sub->add_flag("--no-gate", f.no_gate, "skip the reference self-convergence check");
}

double single(const std::string& text, const char* name) {
  const auto v = h::parse_list(text);
  if (v.size() != 1) throw dirac4cfd::InvalidArgument(std::string(name) + " takes a single value here");
  return v.front();
}

h::ExperimentSpec build_spec(h::Command cmd, const Flags& f) {
  h::ExperimentSpec spec = h::defaults_for(cmd);
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw dirac4cfd::InvalidArgument("cannot parse " + f.config + ": " + e.what());
    }
    h::apply_json(spec, j);
  }
  if (!f.preset.empty()) {
    spec.preset = f.preset;
    dirac4cfd::problems::preset(spec.preset);  // validates the name
  }
  if (!f.scheme.empty()) spec.scheme = dirac4cfd::parse_scheme(f.scheme);
  if (!f.epsilon.empty()) spec.epsilons = h::parse_list(f.epsilon);
  if (!f.tfinal.empty()) {
    spec.t_final = h::parse_number(f.tfinal);
    if (cmd == h::Command::Dynamics2D && f.snapshots.empty()) {
      const double t = spec.t_final;
      spec.snapshot_times = {0.0, 0.25 * t, 0.5 * t, 0.75 * t, t};
    }
  }
  if (!f.snapshots.empty()) spec.snapshot_times = h::parse_list(f.snapshots);
  if (!f.out.empty()) spec.out_dir = f.out;
  if (f.seed) spec.seed = *f.seed;
  if (f.allow_unstable) spec.allow_unstable = true;
  if (f.compare) spec.compare_reference = true;
  if (f.no_gate) spec.reference.gate = false;

  switch (cmd) {
    case h::Command::ConvergeSpace:
      if (!f.h.empty()) spec.resolutions = h::parse_list(f.h);
      if (!f.tau.empty()) spec.companion = single(f.tau, "--tau");
      break;
    case h::Command::ConvergeTime:
      if (!f.tau.empty()) spec.resolutions = h::parse_list(f.tau);
      if (!f.h.empty()) spec.companion = single(f.h, "--h");
      break;
    default:
      if (!f.h.empty()) spec.h = single(f.h, "--h");
      if (!f.tau.empty()) spec.tau = single(f.tau, "--tau");
      break;
  }
  return spec;
}

void print_table(const h::ConvergenceTable& t) {
  std::printf("%-14s %-14s %-12s %-12s %-12s %-8s %-8s %-8s %s\n", "epsilon", "resolution", "e_phi", "e_rho", "e_J",
              "ord_phi", "ord_rho", "ord_J", "");
  const auto ord = [](const std::optional<double>& o) {
    char buf[16];
    if (o) std::snprintf(buf, sizeof buf, "%.2f", *o);
    else std::snprintf(buf, sizeof buf, "-");
    return std::string(buf);
  };
  for (const auto& r : t.rows)
    std::printf("%-14.6e %-14.6e %-12.3e %-12.3e %-12.3e %-8s %-8s %-8s %s%s\n", r.epsilon, r.resolution, r.e_phi,
                r.e_rho, r.e_J, ord(r.order_phi).c_str(), ord(r.order_rho).c_str(), ord(r.order_J).c_str(),
                r.diagonal ? "*" : "", r.stable ? "" : " unstable");
}

int execute(h::Command cmd, const h::ExperimentSpec& spec) {
  const fs::path dir = spec.out_dir;
  h::ensure_dir(dir);
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> files;

  switch (cmd) {
    case h::Command::ConvergeSpace:
    case h::Command::ConvergeTime: {
      const h::ConvergenceTable t = h::converge(spec, cmd == h::Command::ConvergeSpace ? h::Axis::Space : h::Axis::Time);
      const std::string name = cmd == h::Command::ConvergeSpace ? "converge_space.csv" : "converge_time.csv";
      h::write_table(t, dir / name);
      files.push_back(name);
      print_table(t);
      nlohmann::json gates = nlohmann::json::array();
      for (const auto& g : t.gate_discrepancy) gates.push_back(g ? nlohmann::json(*g) : nlohmann::json(nullptr));
      results["reference_gate_discrepancy"] = gates;
      break;
    }
    case h::Command::Conserve: {
      const auto series = h::conserve(spec);
      h::write_conserve(series, dir);
      files = {"conserve.csv", "conserve_summary.csv"};
      for (const auto& s : series) {
        std::printf("epsilon %-10.4g mass drift %.3e  energy drift %s\n", s.epsilon, s.max_mass_drift,
                    h::fmt(s.max_energy_drift).c_str());
        results["max_rel_mass_drift"].push_back(s.max_mass_drift);
        results["max_rel_energy_drift"].push_back(s.max_energy_drift ? nlohmann::json(*s.max_energy_drift)
                                                                      : nlohmann::json(nullptr));
      }
      break;
    }
    case h::Command::Dynamics2D: {
      const auto res = h::dynamics2d(spec);
      files = h::write_dynamics(res, spec, dir);
      for (const auto& d : res.snapshots)
        std::printf("epsilon %-6.3g t %-6.3g mass %.6e max_rho %.4e radius %.4f growth %.4f\n", d.epsilon, d.t, d.mass,
                    d.max_rho, d.radius, d.growth);
      break;
    }
    case h::Command::Solve: {
      const auto res = h::solve(spec);
      files = h::write_solve(res, spec, dir);
      std::printf("steps %zu  tau_max %s  mass %.12e\n", res.trajectory.steps,
                  h::fmt(res.trajectory.stability.tau_max).c_str(), dirac4cfd::mass_l2(res.trajectory.final_field));
      if (res.errors) {
        std::printf("e_phi %.6e  e_rho %.6e  e_J %.6e\n", res.errors->e_phi, res.errors->e_rho, res.errors->e_J);
        results["e_phi"] = res.errors->e_phi;
        results["e_rho"] = res.errors->e_rho;
        results["e_J"] = res.errors->e_J;
      }
      results["stable"] = res.trajectory.stability.ok;
      results["tau_max"] = res.trajectory.stability.tau_max;
      break;
    }
    case h::Command::OracleCheck: {
      const auto rep = h::oracle_check(spec.seed);
      const nlohmann::json j = rep.to_json();
      h::write_json(dir / "oracle_report.json", j);
      files.push_back("oracle_report.json");
      std::cout << j.dump(2) << '\n';
      results["passed"] = rep.all_passed();
      h::write_manifest(dir, spec, files, results);
      return rep.all_passed() ? 0 : 5;
    }
  }
  h::write_manifest(dir, spec, files, results);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact fourth-order finite difference solvers for the Dirac equation"};
  // -h would clash with the mesh-size flag --h.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Flags flags;
  const std::pair<h::Command, const char*> commands[] = {
      {h::Command::ConvergeSpace, "spatial convergence table against a splitting reference"},
      {h::Command::ConvergeTime, "temporal convergence table against a splitting reference"},
      {h::Command::Conserve, "mass and energy time series"},
      {h::Command::Dynamics2D, "2D density snapshots"},
      {h::Command::OracleCheck, "dense-solve, Parseval, unitarity and amplification checks"},
      {h::Command::Solve, "single run"},
  };
  std::vector<std::pair<CLI::App*, h::Command>> subs;
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(std::string(h::to_string(cmd)), help);
    add_common(sub, flags);
    if (cmd == h::Command::Solve)
      sub->add_flag("--compare", flags.compare, "measure errors against the splitting reference");
    subs.emplace_back(sub, cmd);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  h::Command cmd = h::Command::Solve;
  for (const auto& [sub, c] : subs)
    if (sub->parsed()) cmd = c;

  try {
    const h::ExperimentSpec spec = build_spec(cmd, flags);
    if (spec.allow_unstable)
      std::cerr << "warning: stability gate overridden (--allow-unstable); results past the bound may blow up\n";
    return execute(cmd, spec);
  } catch (const dirac4cfd::StabilityViolation& e) {
    std::cerr << "refused: " << e.what() << " (pass --allow-unstable to override)\n";
    return 3;
  } catch (const h::GateFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const dirac4cfd::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
