#pragma once

#include <cstddef>
#include <functional>

namespace diffeoflow {

/// Worker count: DIFFEOFLOW_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, count) on up to thread_count() threads.
/// Iterations must be independent; results are identical for any thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace diffeoflow
