#pragma once

#include <cstddef>
#include <functional>

namespace mkf {

/// Worker count used by the data-parallel loops. 0 selects the hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs body(i) for i in [0, n) across the worker pool. Iterations must be independent; results are
/// identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mkf
