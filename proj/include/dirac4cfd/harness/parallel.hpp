#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "dirac4cfd/harness/experiment.hpp"

namespace dirac4cfd::harness {

/**
 * Runs fn(0..count-1) on at most thread_cap() workers. Results must be
 * written by index; if any call throws, the exception of the lowest index
 * is rethrown after all workers join, so failures are reproducible.
 */
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned cap = thread_cap()) {
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, cap), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dirac4cfd::harness
