#pragma once

namespace germlin {

// Thread count used by the OpenMP kernels. GERMLIN_THREADS, when set,
// wins over the requested value.
void set_threads(int requested);
int thread_count();

}  // namespace germlin
