#pragma once

#include <functional>
#include <vector>

namespace fdl {

// Worker cap: FDL_THREADS environment variable, 0 or unset = hardware count.
int worker_count();

// Runs the tasks on up to worker_count() threads. Tasks must write disjoint
// state so the result is independent of scheduling; exceptions are rethrown
// on the calling thread (first one wins).
void run_tasks(std::vector<std::function<void()>> tasks);

}  // namespace fdl
