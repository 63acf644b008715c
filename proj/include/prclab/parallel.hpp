#ifndef PRCLAB_PARALLEL_HPP
#define PRCLAB_PARALLEL_HPP

#include <functional>

namespace prclab {

/// Worker cap: min(hardware_concurrency, PRCLAB_THREADS), at least 1.
int worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads. Work items
/// write to disjoint slots, so results do not depend on the thread count.
/// Exceptions are captured and the first one rethrown.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace prclab

#endif
