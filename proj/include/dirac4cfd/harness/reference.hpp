#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "dirac4cfd/field.hpp"
#include "dirac4cfd/harness/experiment.hpp"
#include "dirac4cfd/harness/output.hpp"
#include "dirac4cfd/observables.hpp"
#include "dirac4cfd/problems.hpp"
#include "dirac4cfd/tssp.hpp"

namespace dirac4cfd::harness {

/// The reference failed its self-convergence check.
class GateFailure : public Error {
public:
  using Error::Error;
};

struct Reference {
  Grid grid;
  SpinorField field;
  double t = 0.0;
  /// Relative l2 distance to the (h/2, tau/2) reference; empty when the gate is off.
  std::optional<double> gate_discrepancy;
};

inline Grid reference_grid(const Problem& p, double h) { return build_grid_with_h(p.a, p.b, h, p.dim); }

inline Reference compute_reference_at(const Problem& p, double eps, const ReferenceSettings& rs, double t) {
  const double times[1] = {t};
  const Grid fine = reference_grid(p, rs.h);
  Reference r{fine, compute_reference(fine, eps, rs.tau, p.initial, p.potentials, times).front(), t, std::nullopt};
  if (rs.gate) {
    const Grid finer = build_grid(p.a, p.b, 2 * fine.n(), p.dim);
    const SpinorField check = compute_reference(finer, eps, 0.5 * rs.tau, p.initial, p.potentials, times).front();
    r.gate_discrepancy = relative_error(r.field, restrict_to(check, fine), Quantity::Phi, eps);
  }
  return r;
}

/**
 * Process-wide memo of splitting references keyed by problem, epsilon,
 * reference resolution and final time. Concurrent requests for the same key
 * wait on one computation.
 */
class ReferenceCache {
public:
  static ReferenceCache& instance() {
    static ReferenceCache cache;
    return cache;
  }

  std::shared_ptr<const Reference> get(const Problem& p, double eps, const ReferenceSettings& rs, double t) {
    const std::string key = p.name + '|' + fmt(eps) + '|' + fmt(rs.h) + '|' + fmt(rs.tau) + '|' + fmt(t) + '|' +
                            (rs.gate ? "g" : "-");
    std::promise<std::shared_ptr<const Reference>> promise;
    std::shared_future<std::shared_ptr<const Reference>> future;
    bool owner = false;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        future = promise.get_future().share();
        entries_.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const Reference>(compute_reference_at(p, eps, rs, t)));
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(mutex_);
          entries_.erase(key);
        }
        promise.set_exception(std::current_exception());
      }
    }
    return future.get();
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.clear();
  }

private:
  ReferenceCache() = default;
  std::mutex mutex_;
  std::map<std::string, std::shared_future<std::shared_ptr<const Reference>>> entries_;
};

/// Throws GateFailure unless the reference agrees with its (h/2, tau/2) refinement to gate_tol.
inline void enforce_gate(const Reference& r, double eps, double gate_tol) {
  if (!r.gate_discrepancy) return;
  if (!(*r.gate_discrepancy <= gate_tol))
    throw GateFailure("reference self-convergence check failed at epsilon = " + fmt(eps) + ": discrepancy " +
                      fmt(*r.gate_discrepancy) + " against (h/2, tau/2) exceeds " + fmt(gate_tol) +
                      "; refine reference.h / reference.tau");
}

}  // namespace dirac4cfd::harness
