#pragma once

#include <cstddef>
#include <functional>

namespace hnswlab {

/// Number of workers for a request; 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs body(i) for i in [0, count) over `threads` workers using static
/// contiguous chunks. Callers write results by index, so output never depends
/// on the worker count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace hnswlab
