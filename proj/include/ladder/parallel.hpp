#pragma once

#include <cstddef>
#include <functional>

namespace ladder {

// Worker count: LADDER_GATE_THREADS if set and positive, otherwise the
// hardware concurrency (0 or unset means auto).
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is processed exactly once and
// bodies must only write to their own outputs, so results do not depend on
// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace ladder
