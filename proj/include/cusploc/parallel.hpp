#pragma once

#include <cstddef>
#include <functional>

namespace cusploc {

// Number of workers to use when the caller passes 0: CUSPLOC_WORKERS if set,
// otherwise the hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

// Calls body(i) for i in [0, count) on up to `workers` threads. Each index is
// processed exactly once; callers write results into slot i so aggregation
// order never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace cusploc
