#pragma once

#include <cstddef>
#include <functional>

namespace rlos {

/// Worker count: RLOS_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

/// Calls body(i) for i in [0, count), spread over `threads` workers in
/// contiguous chunks. Every index is visited exactly once; the body must
/// only write to state owned by its index. The first exception thrown by
/// any worker is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = default_thread_count());

}  // namespace rlos
