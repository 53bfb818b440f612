#pragma once

#include <cstddef>
#include <functional>

namespace nlab {

/// Worker cap: NONLOCALITY_LAB_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. The body
/// must only touch per-index state. Exceptions are rethrown on the caller
/// (the one from the lowest failing index).
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace nlab
