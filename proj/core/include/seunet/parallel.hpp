#pragma once

#include <cstddef>
#include <functional>

namespace seunet {

/// Worker count: SEUNET_THREADS if set (>=1), otherwise hardware concurrency.
int thread_count();

/// Runs body(begin, end) over a static partition of [0, n). Partitioning
/// depends only on n and the worker count; bodies must write disjoint
/// outputs. Reductions that must be bit-stable across different worker
/// counts should accumulate into a fixed number of chunks instead (see
/// chunked_ranges).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Fixed chunk grid for deterministic reductions: the same n always yields
/// the same chunk boundaries, so summing chunk partials in index order gives
/// identical results for any worker count.
inline constexpr std::size_t kReduceChunks = 64;

inline std::size_t chunk_begin(std::size_t n, std::size_t chunk, std::size_t chunks) {
  return n * chunk / chunks;
}

}  // namespace seunet
