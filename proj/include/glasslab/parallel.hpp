#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace glasslab {

/// Worker count: GLASSLAB_WORKERS if set, else hardware concurrency,
/// clamped to [1, 64].
int worker_count();

/// Runs fn(block_index, begin, end) for fixed blocks of `block_size` items
/// covering [0, n). Blocks are assigned dynamically to `workers` threads, but
/// the block boundaries are a function of (n, block_size) only, so any
/// per-block output is independent of the worker count and of scheduling.
void for_blocks(std::size_t n, std::size_t block_size, int workers,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Pairwise (tree) summation over values in index order; deterministic for a
/// given input sequence.
double pairwise_sum(const std::vector<double>& values);

}  // namespace glasslab
