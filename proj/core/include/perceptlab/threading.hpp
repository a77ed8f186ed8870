#pragma once

#include <cstddef>
#include <functional>

namespace perceptlab {

// Worker cap from PERCEPTLAB_THREADS; 0 or unset means single-threaded,
// which is the deterministic default.
int thread_cap();

// Runs fn(i) for i in [0, n). Each index must write only to its own
// preallocated slot; chunking is static, so outputs are identical for any
// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace perceptlab
