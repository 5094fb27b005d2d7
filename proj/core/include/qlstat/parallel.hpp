#pragma once

#include <cstddef>
#include <functional>

namespace qlstat {

//! Worker count: QLSTAT_THREADS when set to a positive integer, otherwise
//! the hardware concurrency (at least 1).
unsigned default_thread_count();

//! Runs body(i) for i in [0, count) on up to `threads` workers with static
//! contiguous chunks. If any call throws, the exception from the smallest
//! failing index is rethrown after all workers finish.
void parallel_for(std::size_t count,
                  unsigned threads,
                  const std::function<void(std::size_t)>& body);

} // namespace qlstat
