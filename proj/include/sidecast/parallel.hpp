#pragma once

#include <cstddef>
#include <functional>

namespace sidecast {

// Worker count: SIDECAST_THREADS when set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n) over contiguous blocks. Each index is handled by
// exactly one worker, so results written per index do not depend on the
// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace sidecast
