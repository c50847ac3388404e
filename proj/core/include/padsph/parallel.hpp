#pragma once

#include <cstddef>
#include <functional>

namespace padsph {

/// PADSPH_THREADS if set and positive, otherwise the hardware concurrency.
unsigned default_thread_count();

/// Runs body(begin, end) over a partition of [0, count) on up to `threads`
/// threads (0 = default). The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace padsph
