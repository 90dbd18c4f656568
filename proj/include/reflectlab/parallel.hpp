#pragma once

#include <cstddef>
#include <functional>

namespace reflectlab {

/// Worker count: REFLECTLAB_THREADS if set, else hardware concurrency.
/// An explicit override (set_thread_count) takes precedence over both.
int thread_count();
void set_thread_count(int n);  // n <= 0 restores the default

/// Runs body(i) for i in [begin, end) on up to thread_count() workers.
/// Iterations are split into contiguous static chunks, so any result that
/// only writes slot i is independent of scheduling.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace reflectlab
