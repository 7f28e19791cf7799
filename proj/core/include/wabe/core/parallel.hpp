#pragma once

#include <cstddef>
#include <functional>

namespace wabe {

/// Process-wide cap on worker threads used by render and backward.
/// Zero or negative restores the hardware default.
void set_max_threads(int threads);
int max_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default
/// cap). Work items must write disjoint state; the call returns after all
/// items complete.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace wabe
