#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ngi {

/// Process-wide worker count. 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

/// Runs fn(i0, i1) over a partition of [0, n). Safe only when iterations
/// write disjoint outputs; the partition may depend on the worker count, so
/// any order-sensitive reduction must instead use fixed blocks (see
/// speckle_mc) or accumulate per output element.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace ngi
