#pragma once

#include <cstddef>
#include <functional>

namespace qrc {

/// Runs task(i) for i in [0, count) on up to `workers` threads. Tasks pull
/// indices from a shared counter; callers write results into slot i so the
/// reduction order never depends on scheduling. The first exception thrown
/// by any task is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

/// Worker count used when a caller passes 0.
int default_workers();

}  // namespace qrc
