#pragma once

#include <cstddef>
#include <functional>

namespace lakevort {

// LAKEVORT_THREADS if set, otherwise the hardware concurrency (at least 1).
int default_threads();

// Runs body(i) for i in [0, n) on up to `threads` workers. Callers write
// results by index so output does not depend on scheduling. The first
// exception thrown by any body is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace lakevort
