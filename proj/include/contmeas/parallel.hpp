#pragma once

#include <cstddef>
#include <functional>

namespace contmeas {

/// Worker count: hardware concurrency, capped by CONTMEAS_THREADS if set.
std::size_t worker_count();

/// Calls body(i) for i in [0, n). Work is split into contiguous blocks; body
/// must only write state owned by index i, which keeps results independent of
/// the thread count. The first exception thrown is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace contmeas
