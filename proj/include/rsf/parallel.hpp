#pragma once

#include <cstddef>
#include <functional>

namespace rsf {

/// Worker count used by parallel_for. Resolution order: an explicit
/// set_thread_count(), then RESAMPLE_FORENSICS_THREADS, then the hardware.
int thread_count();
void set_thread_count(int n);

/// Calls fn(i) for every i in [0, n). Each index must write only to its own
/// output slot; the result is then independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rsf
