#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace linspar {

// Runs body(worker_id) on `workers` threads (the caller acts as worker 0) and
// joins them all. The first exception thrown by any worker is rethrown on the
// caller after the join, so a failing worker fails the whole operation.
template <class Body>
void run_workers(unsigned workers, Body&& body) {
  if (workers <= 1) {
    body(0u);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  auto guarded = [&](unsigned id) {
    try {
      body(id);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned id = 1; id < workers; ++id) pool.emplace_back(guarded, id);
  guarded(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Static near-equal split of [0, count) into `workers` contiguous chunks;
// fn(worker_id, begin, end) runs in parallel. Disjoint output slots, no
// synchronization needed by callers.
template <class Fn>
void parallel_chunks(unsigned workers, std::size_t count, Fn&& fn) {
  if (count == 0) return;
  if (workers <= 1) {
    fn(0u, std::size_t{0}, count);
    return;
  }
  std::size_t chunk = (count + workers - 1) / workers;
  run_workers(workers, [&](unsigned id) {
    std::size_t begin = std::min(count, id * chunk);
    std::size_t end = std::min(count, begin + chunk);
    if (begin < end) fn(id, begin, end);
  });
}

}  // namespace linspar
