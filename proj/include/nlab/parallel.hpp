#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace nlab {

// Worker cap: min(NEHARI_LAB_THREADS, hardware). Always at least 1.
int worker_count();

// Splits [0, n) into fixed-size chunks, runs `body(chunk_begin, chunk_end,
// chunk_index)` possibly concurrently, and returns per-chunk results combined
// in chunk order. The chunk grid does not depend on the worker count, so sums
// are bit-identical for any thread setting.
std::vector<double> chunked_map(std::int64_t n, std::int64_t chunk,
                                const std::function<double(std::int64_t, std::int64_t)>& body);

double ordered_sum(const std::vector<double>& parts);

// Fixed-order reduction of body over [0, n).
double chunked_reduce(std::int64_t n, std::int64_t chunk,
                      const std::function<double(std::int64_t, std::int64_t)>& body);

void parallel_for(std::int64_t n, std::int64_t chunk,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

} // namespace nlab
