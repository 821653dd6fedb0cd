#include "germlin/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace germlin {

namespace {
int g_threads = 0;
}

void set_threads(int requested) {
    int n = requested;
    if (const char* env = std::getenv("GERMLIN_THREADS")) {
        try {
            int e = std::stoi(env);
            if (e > 0) n = e;
        } catch (...) {
        }
    }
    if (n <= 0) n = omp_get_max_threads();
    g_threads = n;
    omp_set_num_threads(n);
}

int thread_count() {
    if (g_threads <= 0) set_threads(0);
    return g_threads;
}

}  // namespace germlin
