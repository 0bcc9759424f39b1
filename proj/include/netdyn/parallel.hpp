#pragma once

#include <cstddef>
#include <functional>

namespace netdyn {

/// Worker count used by the library's internal loops. 0 selects hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/**
 * Runs body(begin, end) over a partition of [0, n). Chunk boundaries depend on
 * the thread count, so callers must only write to per-index slots; any
 * reduction across indices happens afterwards in index order.
 */
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

} // namespace netdyn
