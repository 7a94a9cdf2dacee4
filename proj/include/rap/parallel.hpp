#pragma once

#include <cstdint>
#include <functional>

namespace rap {

/// Process-wide worker cap. 0 = auto (RAP_THREADS env var, else hardware
/// concurrency). The CLI's --threads flag routes here.
void set_thread_count(int n);
int thread_count();

/// Run fn over [0, n) split into contiguous chunks, one worker per chunk.
/// Results must be written to disjoint, preallocated slots; outputs are then
/// independent of the schedule.
void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& chunk_fn);

}  // namespace rap
