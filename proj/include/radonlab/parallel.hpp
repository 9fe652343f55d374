#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace radonlab {

/// Global worker count used by the row/angle loops. 1 means serial.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [begin, end). Each index must write only its own
/// output slot, so results never depend on the thread count.
template <class Body>
void parallel_for(int begin, int end, Body&& body) {
  const int total = end - begin;
  const int workers = std::min(thread_count(), total);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i)
      body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = begin + w; i < end; i += workers)
        body(i);
    });
  }
  for (auto& t : pool)
    t.join();
}

} // namespace radonlab
