#pragma once

#include <cstddef>
#include <functional>

namespace matherkit {

/// Worker count from MATHERKIT_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs body(i) for i in [begin, end) on up to worker_count() threads.
///
/// Indices are split into contiguous blocks, so any body that only writes
/// slot i produces results independent of the thread count. Calls made from
/// inside a worker run serially.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace matherkit
