#pragma once

#include <cstddef>
#include <functional>

namespace meso {

/// Worker count used by parallel_for; 0 restores the hardware default.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are
/// disjoint, so bodies that only write to their own indices produce output
/// independent of the thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace meso
