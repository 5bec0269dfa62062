#ifndef POLYDPG_PARALLEL_HPP
#define POLYDPG_PARALLEL_HPP

#include <functional>

namespace polydpg {

/// Worker count: hardware concurrency capped by the POLYDPG_THREADS
/// environment variable (set it to 1 to force serial execution).
int max_threads();

/// Runs fn(i) for i in [0, n); each index must write only its own slot,
/// which keeps results independent of the schedule.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace polydpg

#endif
