#include "volterra/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace volterra {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_threads(unsigned n) { g_threads.store(n == 0 ? 1 : n); }

unsigned threads() { return g_threads.load(); }

void for_chunks(std::size_t n, std::size_t chunk,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;

  auto run_range = [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    fn(c, lo, hi);
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(threads(), n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_range(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        run_range(c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

double fold_chunks(std::size_t n, std::size_t chunk, double init,
                   const std::function<double(std::size_t, std::size_t)>& fn,
                   const std::function<double(double, double)>& combine) {
  if (n == 0) return init;
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(n_chunks);
  for_chunks(n, chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    partial[c] = fn(lo, hi);
  });
  double acc = init;
  for (double v : partial) acc = combine(acc, v);
  return acc;
}

double max_chunks(std::size_t n, std::size_t chunk,
                  const std::function<double(std::size_t, std::size_t)>& fn) {
  return fold_chunks(n, chunk, 0.0, fn,
                     [](double a, double b) { return a > b ? a : b; });
}

}  // namespace volterra
