#pragma once

#include <cstddef>
#include <functional>

namespace reslab {

/// Worker count from RESLAB_THREADS (0 or unset = hardware concurrency).
[[nodiscard]] unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Results must
/// be written to per-index slots; merging is the caller's job, so output does
/// not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace reslab
