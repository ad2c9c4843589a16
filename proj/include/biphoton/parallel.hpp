#pragma once

#include <cstddef>
#include <functional>

namespace biphoton {

/// Worker count: hardware concurrency, capped by BIPHOTON_THREADS when set.
std::size_t thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so bodies that only write their own range produce deterministic results.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace biphoton
