#pragma once

namespace carnot {

// Caps OpenMP worker threads at CARNOT_THREADS when that variable holds a
// positive integer. Returns the resulting thread count.
int apply_thread_env();

int max_threads();

}  // namespace carnot
