#pragma once

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "dirac4cfd/grid.hpp"
#include "dirac4cfd/pauli.hpp"

namespace dirac4cfd::fft {

enum class Direction { Forward = FFTW_FORWARD, Backward = FFTW_BACKWARD };

namespace detail {

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

// FFTW's planner is not thread-safe; execution through the new-array
// interface is. Plans act on two contiguous, SIMD-aligned component blocks
// and are created once per (dim, n, direction).
class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, std::size_t n, Direction dir) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(dim, n, static_cast<int>(dir));
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t total = dim == 1 ? n : n * n;
    Buffer in(fftw_alloc_complex(2 * total));
    Buffer out(fftw_alloc_complex(2 * total));
    const int dims[2] = {static_cast<int>(n), static_cast<int>(n)};
    const int dist = static_cast<int>(total);
    fftw_plan plan = fftw_plan_many_dft(dim, dims, 2, in.get(), nullptr, 1, dist, out.get(), nullptr, 1, dist,
                                        static_cast<int>(dir), FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

// Per-thread aligned scratch holding the two components back to back.
struct Scratch {
  Buffer in;
  Buffer out;
  std::size_t capacity = 0;

  void reserve(std::size_t total) {
    if (capacity >= total) return;
    in.reset(fftw_alloc_complex(2 * total));
    out.reset(fftw_alloc_complex(2 * total));
    capacity = total;
  }
};

inline Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace detail

/// Unnormalized transform of both spinor components.
inline void transform(const Grid& grid, const Spinor* in, Spinor* out, Direction dir) {
  const std::size_t total = grid.size();
  fftw_plan plan = detail::PlanCache::instance().get(grid.dim(), grid.n(), dir);
  detail::Scratch& s = detail::scratch();
  s.reserve(total);
  fftw_complex* a = s.in.get();
  fftw_complex* b = a + total;
  for (std::size_t i = 0; i < total; ++i) {
    a[i][0] = in[i].c1.real();
    a[i][1] = in[i].c1.imag();
    b[i][0] = in[i].c2.real();
    b[i][1] = in[i].c2.imag();
  }
  fftw_execute_dft(plan, s.in.get(), s.out.get());
  const fftw_complex* ra = s.out.get();
  const fftw_complex* rb = ra + total;
  for (std::size_t i = 0; i < total; ++i) out[i] = {{ra[i][0], ra[i][1]}, {rb[i][0], rb[i][1]}};
}

}  // namespace dirac4cfd::fft
