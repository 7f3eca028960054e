#pragma once

#include <cstddef>
#include <functional>

namespace tqm {

// Worker count: TQM_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Splits [0, n) into contiguous chunks, one per worker. Chunk boundaries depend
// only on n and the worker count, so results are reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace tqm
