#pragma once

#include <cstddef>
#include <functional>

namespace expkant {

// Worker count: hardware concurrency capped by EXPKANT_THREADS when set.
unsigned worker_count();

// Override for the current process (0 restores the environment default).
void set_worker_count(unsigned n);

// Runs body(i) for i in [0, n). Exceptions from workers are rethrown on the
// calling thread (the first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace expkant
