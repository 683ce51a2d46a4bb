#ifndef LQZ_PARALLEL_HPP
#define LQZ_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lqz {

/// Runs fn(i) for i in [0, n) on `workers` threads.
///
/// Work is split into contiguous blocks; fn must write only to slots owned by i,
/// so results do not depend on the worker count.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  const std::size_t block = (n + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    std::size_t lo = t * block, hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(m);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

/// Fixed-size chunking used for streaming reductions: chunk boundaries depend
/// only on n, never on the worker count.
struct Chunking {
  std::size_t n, chunk;
  std::size_t count() const { return (n + chunk - 1) / chunk; }
  std::size_t begin(std::size_t c) const { return c * chunk; }
  std::size_t end(std::size_t c) const { return std::min(n, (c + 1) * chunk); }
};

}  // namespace lqz

#endif
