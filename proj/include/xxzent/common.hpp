#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace xxzent {

inline constexpr const char* kVersion = "0.1.0";

// Absolute threshold below which a partial-transpose eigenvalue counts as
// non-negative (i.e. the negativity is treated as zero).
inline constexpr double kDefaultEpsNeg = 1e-10;

// Largest supported chain: dense 4096 x 4096 operators.
inline constexpr int kMaxSites = 12;

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A parameter combination outside the tabulated/closed-form domain.
struct UnsupportedCaseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scan or bracket that did not contain the sought crossing.
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bisection on a sign change of f. Requires f(lo) and f(hi) of opposite sign.
inline double bisect_root(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw RangeError("bisect_root: endpoints do not bracket a sign change");
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Runs fn(0..count-1) on up to `workers` threads. Item order within a thread
// is unspecified; callers must write results into per-index slots.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int n_threads =
      static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace xxzent
