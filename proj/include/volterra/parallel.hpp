#pragma once

#include <cstddef>
#include <functional>

namespace volterra {

// Global worker count, set once by the CLI (--threads) or by tests.
// Every parallel loop below yields results independent of this value:
// chunk boundaries are fixed by the problem size alone, per-chunk results
// are stored by chunk index, and reductions run sequentially in chunk
// order (or are exact order-free operations like max).
void set_threads(unsigned n);
unsigned threads();

// Invoke fn(chunk_index, lo, hi) for consecutive chunks [lo, hi) covering
// [0, n). Chunks are claimed by an atomic counter, so the assignment of
// chunks to workers varies run to run, but the chunks themselves do not.
void for_chunks(std::size_t n, std::size_t chunk,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Deterministic map-reduce over [0, n): evaluates fn on each chunk, then
// folds the per-chunk values in chunk order.
double fold_chunks(std::size_t n, std::size_t chunk, double init,
                   const std::function<double(std::size_t, std::size_t)>& fn,
                   const std::function<double(double, double)>& combine);

// Convenience: parallel max of fn over chunks of [0, n).
double max_chunks(std::size_t n, std::size_t chunk,
                  const std::function<double(std::size_t, std::size_t)>& fn);

}  // namespace volterra
