#include "ngi/threads.hpp"

#include <atomic>

namespace ngi {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  int workers = std::min<std::int64_t>(thread_count(), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::int64_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    std::int64_t i0 = w * chunk;
    std::int64_t i1 = std::min<std::int64_t>(i0 + chunk, n);
    if (i0 >= i1) break;
    pool.emplace_back([&fn, i0, i1] { fn(i0, i1); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ngi
