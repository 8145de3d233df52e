#include "carnot/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace carnot {

int apply_thread_env() {
    if (const char* v = std::getenv("CARNOT_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n > 0 && n < omp_get_max_threads()) omp_set_num_threads(static_cast<int>(n));
    }
    return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace carnot
