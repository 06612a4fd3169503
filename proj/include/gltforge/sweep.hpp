#pragma once

#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gltforge {

/// Worker count: explicit value, else GLTFORGE_THREADS, else 1.
inline int resolve_threads(std::optional<int> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("GLTFORGE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 1;
}

/// Reference implementation: f(0), ..., f(n-1) in order.
template <class F>
auto sweep_serial(std::size_t n, F&& f) {
  using R = std::decay_t<decltype(f(std::size_t{}))>;
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

/// Same results as sweep_serial, in the same order, computed by up to
/// `threads` OpenMP workers. The first exception (lowest index) is rethrown.
template <class F>
auto sweep_parallel(std::size_t n, F&& f, int threads) {
  using R = std::decay_t<decltype(f(std::size_t{}))>;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1)
  for (long i = 0; i < count; ++i) {
    try {
      slots[static_cast<std::size_t>(i)].emplace(f(static_cast<std::size_t>(i)));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace gltforge
