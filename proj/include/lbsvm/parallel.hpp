#pragma once

#include <cstddef>
#include <functional>

namespace lbsvm {

/// Upper bound on worker threads for parallel_for; 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Calls fn(i) for i in [0, n), possibly concurrently. Blocks until done and
/// rethrows the first exception raised by a worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lbsvm
