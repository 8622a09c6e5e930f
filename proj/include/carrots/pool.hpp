#pragma once

// Fixed-width worker pool for independent work items. Results land in
// caller-owned slots indexed by item, so output order never depends on
// scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace carrots {

template <class F>
void parallel_for(std::size_t count, int width, F&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, width));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(std::min(workers, count));
  for (std::size_t t = 0; t < std::min(workers, count); ++t) threads.emplace_back(run);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace carrots
