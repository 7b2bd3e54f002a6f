#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace srb {

/// Runs body(i) for i in [0, count) on up to hardware_concurrency threads with
/// static contiguous chunks. Callers write results into per-index slots and
/// reduce serially afterwards, so the outcome does not depend on the thread
/// count. The first exception thrown by any worker is rethrown. `grain` is the
/// smallest amount of work worth a thread of its own.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t grain = 256) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min({hw, count, count / std::max<std::size_t>(grain, 1) + 1});
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace srb
