#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirac4cfd/dirac4cfd.hpp"
#include "dirac4cfd/harness/experiment.hpp"
#include "dirac4cfd/harness/output.hpp"
#include "dirac4cfd/harness/parallel.hpp"
#include "dirac4cfd/harness/reference.hpp"

namespace dirac4cfd::harness {

inline constexpr const char* kVersion = "0.1.0";

inline SchemeConfig scheme_config(const ExperimentSpec& spec, double eps, double tau) {
  SchemeConfig cfg;
  cfg.epsilon = eps;
  cfg.tau = tau;
  cfg.t_final = spec.t_final;
  cfg.scheme = spec.scheme;
  cfg.linear_solver_tol = spec.linear_solver_tol;
  cfg.linear_solver_max_iter = spec.linear_solver_max_iter;
  cfg.allow_unstable = spec.allow_unstable;
  return cfg;
}

/// Samples the problem's initial data (and analytic gradient, if any) on `g` and integrates.
inline Trajectory simulate(const Problem& p, const Grid& g, const SchemeConfig& cfg) {
  const SpinorField phi0 = sample_field(p.initial, g);
  std::optional<std::vector<SpinorField>> grad;
  if (!p.initial_gradient.empty()) {
    grad.emplace();
    for (const auto& f : p.initial_gradient) grad->push_back(sample_field(f, g));
  }
  return run(cfg, g, phi0, grad, p.potentials);
}

// ---------------------------------------------------------------------------
// Convergence tables

enum class Axis { Space, Time };

struct TableRow {
  double epsilon = 0.0;
  double resolution = 0.0;
  double e_phi = std::numeric_limits<double>::quiet_NaN();
  double e_rho = std::numeric_limits<double>::quiet_NaN();
  double e_J = std::numeric_limits<double>::quiet_NaN();
  /// log2 of the error ratio to the previous (coarser) row of the same epsilon.
  std::optional<double> order_phi, order_rho, order_J;
  double companion = 0.0;
  bool diagonal = false;
  bool stable = true;
};

struct ConvergenceTable {
  Axis axis = Axis::Space;
  std::vector<TableRow> rows;
  /// Per epsilon, in configuration order.
  std::vector<std::optional<double>> gate_discrepancy;

  const TableRow* find(double eps, double res) const {
    for (const auto& r : rows)
      if (std::abs(r.epsilon - eps) <= 1e-12 * eps && std::abs(r.resolution - res) <= 1e-9 * res) return &r;
    return nullptr;
  }
};

inline const std::vector<std::string>& table_header() {
  static const std::vector<std::string> h{"epsilon", "resolution", "e_phi",   "e_rho",   "e_J",     "order_phi",
                                          "order_rho", "order_J",  "companion", "diagonal", "stable"};
  return h;
}

inline void write_table(const ConvergenceTable& t, const std::filesystem::path& path) {
  CsvWriter csv(path, table_header());
  for (const auto& r : t.rows)
    csv.row({fmt(r.epsilon), fmt(r.resolution), fmt(r.e_phi), fmt(r.e_rho), fmt(r.e_J), fmt(r.order_phi),
             fmt(r.order_rho), fmt(r.order_J), fmt(r.companion), r.diagonal ? "1" : "0", r.stable ? "1" : "0"});
}

namespace detail {

inline double companion_for(const ExperimentSpec& spec, Axis axis, double eps) {
  if (spec.companion) return *spec.companion;
  return axis == Axis::Space ? default_space_companion_tau(eps, spec.t_final) : std::numbers::pi / 256.0;
}

inline void fill_orders(std::vector<TableRow>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].epsilon != rows[k - 1].epsilon) continue;
    const double ep[2] = {rows[k - 1].e_phi, rows[k].e_phi};
    const double er[2] = {rows[k - 1].e_rho, rows[k].e_rho};
    const double ej[2] = {rows[k - 1].e_J, rows[k].e_J};
    rows[k].order_phi = convergence_order(ep).front();
    rows[k].order_rho = convergence_order(er).front();
    rows[k].order_J = convergence_order(ej).front();
  }
}

// Flags, per epsilon, the row nearest (in log scale, within sqrt 2) to anchor * eps^exponent.
inline void mark_diagonal(std::vector<TableRow>& rows, double anchor, double exponent) {
  if (!(anchor > 0.0)) return;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double target = anchor * std::pow(rows[k].epsilon, exponent);
    const double dist = std::abs(std::log2(rows[k].resolution / target));
    rows[k].diagonal = dist < 0.5;
  }
}

}  // namespace detail

/**
 * Sweeps (epsilon, resolution) cells against splitting references. Cells run
 * in parallel; a cell whose step exceeds the stability bound is reported with
 * NaN errors unless allow_unstable is set. Throws GateFailure if a reference
 * fails its self-convergence check.
 */
inline ConvergenceTable converge(const ExperimentSpec& spec, Axis axis) {
  if (spec.epsilons.empty()) throw InvalidArgument("epsilon list is empty");
  validate_halving(spec.resolutions);
  const Problem p = problems::preset(spec.preset);

  std::vector<std::shared_ptr<const Reference>> refs(spec.epsilons.size());
  parallel_for(refs.size(), [&](std::size_t i) {
    refs[i] = ReferenceCache::instance().get(p, spec.epsilons[i], spec.reference, spec.t_final);
  });

  ConvergenceTable table;
  table.axis = axis;
  for (double eps : spec.epsilons)
    for (double res : spec.resolutions) {
      TableRow r;
      r.epsilon = eps;
      r.resolution = res;
      r.companion = detail::companion_for(spec, axis, eps);
      table.rows.push_back(r);
    }

  parallel_for(table.rows.size(), [&](std::size_t k) {
    TableRow& r = table.rows[k];
    const Reference& ref = *refs[k / spec.resolutions.size()];
    const double h = axis == Axis::Space ? r.resolution : r.companion;
    const double tau = axis == Axis::Space ? r.companion : r.resolution;
    const Grid g = build_grid_with_h(p.a, p.b, h, p.dim);
    try {
      const Trajectory traj = simulate(p, g, scheme_config(spec, r.epsilon, tau));
      r.stable = traj.stability.ok;
      const ErrorTriple e = error_triple(traj.final_field, restrict_to(ref.field, g), r.epsilon);
      r.e_phi = e.e_phi;
      r.e_rho = e.e_rho;
      r.e_J = e.e_J;
    } catch (const StabilityViolation&) {
      r.stable = false;
    } catch (const NonFiniteValue&) {
      r.stable = false;
      r.e_phi = r.e_rho = r.e_J = std::numeric_limits<double>::infinity();
    }
  });

  detail::fill_orders(table.rows);
  detail::mark_diagonal(table.rows, spec.diagonal_anchor, spec.diagonal_exponent);

  for (std::size_t i = 0; i < refs.size(); ++i) {
    table.gate_discrepancy.push_back(refs[i]->gate_discrepancy);
    enforce_gate(*refs[i], spec.epsilons[i], spec.reference.gate_tol);
  }
  return table;
}

inline ConvergenceTable converge_space(const ExperimentSpec& spec) { return converge(spec, Axis::Space); }
inline ConvergenceTable converge_time(const ExperimentSpec& spec) { return converge(spec, Axis::Time); }

// ---------------------------------------------------------------------------
// Conservation series

struct ConserveSeries {
  double epsilon = 0.0;
  std::vector<StepDiagnostics> steps;
  double max_mass_drift = 0.0;
  /// Empty for time-dependent potentials.
  std::optional<double> max_energy_drift;
};

inline std::vector<ConserveSeries> conserve(const ExperimentSpec& spec) {
  const Problem p = problems::preset(spec.preset);
  if (!spec.h || !spec.tau) throw InvalidArgument("conserve needs h and tau");
  const Grid g = build_grid_with_h(p.a, p.b, *spec.h, p.dim);
  std::vector<ConserveSeries> out(spec.epsilons.size());
  parallel_for(out.size(), [&](std::size_t i) {
    SchemeConfig cfg = scheme_config(spec, spec.epsilons[i], *spec.tau);
    cfg.diagnostics = true;
    const Trajectory traj = simulate(p, g, cfg);
    ConserveSeries& s = out[i];
    s.epsilon = spec.epsilons[i];
    s.steps = traj.diagnostics;
    const double m0 = s.steps.front().mass;
    for (const auto& d : s.steps) s.max_mass_drift = std::max(s.max_mass_drift, std::abs(d.mass - m0) / std::abs(m0));
    if (s.steps.front().energy) {
      const double e0 = *s.steps.front().energy;
      double drift = 0.0;
      for (const auto& d : s.steps) drift = std::max(drift, std::abs(*d.energy - e0) / std::abs(e0));
      s.max_energy_drift = drift;
    }
  });
  return out;
}

inline void write_conserve(const std::vector<ConserveSeries>& series, const std::filesystem::path& dir) {
  CsvWriter csv(dir / "conserve.csv", {"epsilon", "n", "t", "mass", "energy"});
  for (const auto& s : series)
    for (const auto& d : s.steps)
      csv.row({fmt(s.epsilon), std::to_string(d.n), fmt(d.t), fmt(d.mass), fmt(d.energy)});
  CsvWriter sum(dir / "conserve_summary.csv",
                {"epsilon", "mass0", "energy0", "max_rel_mass_drift", "max_rel_energy_drift"});
  for (const auto& s : series)
    sum.row({fmt(s.epsilon), fmt(s.steps.front().mass), fmt(s.steps.front().energy), fmt(s.max_mass_drift),
             fmt(s.max_energy_drift)});
}

// ---------------------------------------------------------------------------
// 2D dynamics

struct DensitySnapshot {
  double epsilon = 0.0;
  double t = 0.0;
  double mass = 0.0;
  double max_rho = 0.0;
  /// Largest distance from the initial density centroid to a node with rho above the threshold.
  double radius = 0.0;
  double growth = 0.0;
  std::vector<double> rho;
};

struct DynamicsResult {
  Grid grid;
  std::vector<DensitySnapshot> snapshots;  // epsilon-major, then time
};

inline Point density_centroid(const Grid& g, const std::vector<double>& rho) {
  double w = 0.0;
  Point c{0.0, 0.0};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const Point x = g.node(i);
    w += rho[i];
    c[0] += rho[i] * x[0];
    c[1] += rho[i] * x[1];
  }
  return {c[0] / w, c[1] / w};
}

inline double support_radius(const Grid& g, const std::vector<double>& rho, const Point& center, double threshold) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > threshold)) continue;
    const Point x = g.node(i);
    const double dx = x[0] - center[0];
    const double dy = x[1] - center[1];
    r2 = std::max(r2, dx * dx + dy * dy);
  }
  return std::sqrt(r2);
}

inline DynamicsResult dynamics2d(const ExperimentSpec& spec) {
  const Problem p = problems::preset(spec.preset);
  if (p.dim != 2) throw InvalidArgument("dynamics2d needs a 2D preset, got '" + spec.preset + "'");
  if (!spec.tau) throw InvalidArgument("dynamics2d needs tau");
  if (spec.snapshot_times.empty()) throw InvalidArgument("dynamics2d needs snapshot times");
  const double h = spec.h ? *spec.h : default_h_2d(spec.preset);
  const Grid g = build_grid_with_h(p.a, p.b, h, p.dim);

  const std::vector<double> rho0 = total_density(sample_field(p.initial, g));
  const Point center = density_centroid(g, rho0);
  const double r0 = support_radius(g, rho0, center, spec.support_threshold);

  DynamicsResult res{g, std::vector<DensitySnapshot>(spec.epsilons.size() * spec.snapshot_times.size())};
  parallel_for(spec.epsilons.size(), [&](std::size_t i) {
    SchemeConfig cfg = scheme_config(spec, spec.epsilons[i], *spec.tau);
    cfg.snapshot_times = spec.snapshot_times;
    const Trajectory traj = simulate(p, g, cfg);
    for (std::size_t s = 0; s < spec.snapshot_times.size(); ++s) {
      DensitySnapshot& d = res.snapshots[i * spec.snapshot_times.size() + s];
      d.epsilon = spec.epsilons[i];
      d.t = spec.snapshot_times[s];
      d.rho = total_density(traj.snapshots[s]);
      d.mass = 0.0;
      for (double v : d.rho) d.mass += v;
      d.mass *= g.cell_volume();
      d.max_rho = *std::max_element(d.rho.begin(), d.rho.end());
      d.radius = support_radius(g, d.rho, center, spec.support_threshold);
      d.growth = d.radius - r0;
    }
  });
  return res;
}

inline std::vector<std::string> write_dynamics(const DynamicsResult& res, const ExperimentSpec& spec,
                                               const std::filesystem::path& dir) {
  std::vector<std::string> files;
  CsvWriter csv(dir / "dynamics_summary.csv", {"epsilon", "t", "mass", "max_rho", "radius", "growth"});
  const std::size_t n_t = spec.snapshot_times.size();
  for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
    const DensitySnapshot& d = res.snapshots[k];
    const std::string stem = "rho_e" + std::to_string(k / n_t) + "_t" + std::to_string(k % n_t);
    write_raw_grid(dir / (stem + ".bin"), d.rho);
    write_json(dir / (stem + ".json"), {{"file", stem + ".bin"},
                                        {"format", "float64 little-endian, row-major, rows indexed by x"},
                                        {"quantity", "rho"},
                                        {"grid", grid_json(res.grid)},
                                        {"shape", {res.grid.n(), res.grid.n()}},
                                        {"t", d.t},
                                        {"epsilon", d.epsilon},
                                        {"preset", spec.preset},
                                        {"scheme", std::string(to_string(spec.scheme))},
                                        {"tau", *spec.tau}});
    files.push_back(stem + ".bin");
    files.push_back(stem + ".json");
    csv.row({fmt(d.epsilon), fmt(d.t), fmt(d.mass), fmt(d.max_rho), fmt(d.radius), fmt(d.growth)});
  }
  files.push_back("dynamics_summary.csv");
  return files;
}

// ---------------------------------------------------------------------------
// Single run

struct SolveResult {
  Grid grid;
  Trajectory trajectory;
  std::optional<ErrorTriple> errors;
  std::optional<double> gate_discrepancy;
};

inline SolveResult solve(const ExperimentSpec& spec) {
  if (spec.epsilons.size() != 1) throw InvalidArgument("solve takes exactly one epsilon");
  if (!spec.h || !spec.tau) throw InvalidArgument("solve needs h and tau");
  const Problem p = problems::preset(spec.preset);
  const Grid g = build_grid_with_h(p.a, p.b, *spec.h, p.dim);
  SchemeConfig cfg = scheme_config(spec, spec.epsilons.front(), *spec.tau);
  cfg.snapshot_times = spec.snapshot_times;
  cfg.diagnostics = spec.diagnostics;
  SolveResult res{g, simulate(p, g, cfg), std::nullopt, std::nullopt};
  if (spec.compare_reference) {
    const auto ref = ReferenceCache::instance().get(p, cfg.epsilon, spec.reference, spec.t_final);
    res.errors = error_triple(res.trajectory.final_field, restrict_to(ref->field, g), cfg.epsilon);
    res.gate_discrepancy = ref->gate_discrepancy;
    enforce_gate(*ref, cfg.epsilon, spec.reference.gate_tol);
  }
  return res;
}

inline void write_field_csv(const SpinorField& u, const std::filesystem::path& path) {
  const Grid& g = u.grid();
  std::vector<std::string> header = g.dim() == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
  for (const char* c : {"re_phi1", "im_phi1", "re_phi2", "im_phi2", "rho"}) header.emplace_back(c);
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point x = g.node(i);
    std::vector<std::string> row{fmt(x[0])};
    if (g.dim() == 2) row.push_back(fmt(x[1]));
    for (double v : {u[i].c1.real(), u[i].c1.imag(), u[i].c2.real(), u[i].c2.imag(), norm2(u[i])})
      row.push_back(fmt(v));
    csv.row(row);
  }
}

inline std::vector<std::string> write_solve(const SolveResult& res, const ExperimentSpec& spec,
                                            const std::filesystem::path& dir) {
  std::vector<std::string> files{"solution.csv", "solve_summary.csv"};
  write_field_csv(res.trajectory.final_field, dir / "solution.csv");
  CsvWriter sum(dir / "solve_summary.csv",
                {"epsilon", "h", "tau", "t_final", "steps", "tau_max", "stable", "mass", "e_phi", "e_rho", "e_J"});
  const auto& e = res.errors;
  sum.row({fmt(spec.epsilons.front()), fmt(*spec.h), fmt(*spec.tau), fmt(spec.t_final),
           std::to_string(res.trajectory.steps), fmt(res.trajectory.stability.tau_max),
           res.trajectory.stability.ok ? "1" : "0", fmt(mass_l2(res.trajectory.final_field)),
           fmt(e ? e->e_phi : std::numeric_limits<double>::quiet_NaN()),
           fmt(e ? e->e_rho : std::numeric_limits<double>::quiet_NaN()),
           fmt(e ? e->e_J : std::numeric_limits<double>::quiet_NaN())});
  if (!res.trajectory.diagnostics.empty()) {
    CsvWriter csv(dir / "diagnostics.csv", {"n", "t", "mass", "energy"});
    for (const auto& d : res.trajectory.diagnostics)
      csv.row({std::to_string(d.n), fmt(d.t), fmt(d.mass), fmt(d.energy)});
    files.push_back("diagnostics.csv");
  }
  for (std::size_t s = 0; s < res.trajectory.snapshots.size(); ++s) {
    const std::string name = "snapshot_" + std::to_string(s) + ".csv";
    write_field_csv(res.trajectory.snapshots[s], dir / name);
    files.push_back(name);
  }
  return files;
}

inline void write_manifest(const std::filesystem::path& dir, const ExperimentSpec& spec,
                           const std::vector<std::string>& files, const nlohmann::json& results = nlohmann::json::object()) {
  nlohmann::json j;
  j["tool"] = "dirac4cfd";
  j["version"] = kVersion;
  j["spec"] = to_json(spec);
  j["outputs"] = files;
  j["results"] = results;
  write_json(dir / "manifest.json", j);
}

}  // namespace dirac4cfd::harness
