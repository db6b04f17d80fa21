#pragma once

#include <functional>

namespace sephier {

/// Worker cap: SEPHIER_THREADS when set, hardware concurrency otherwise.
int worker_limit();

/// Runs fn(0), .., fn(count-1), possibly across threads. Callers must write
/// results into per-index slots; the outcome is then schedule-independent.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace sephier
