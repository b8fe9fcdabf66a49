#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "rnls/common.hpp"

namespace rnls {

// Run body(i) for i in [0, n_items) on n_workers threads. Work items must be
// independent and write only to their own preallocated slots, so the result
// is identical for every worker count; reductions happen after the join, in
// index order. n_workers = 1 runs inline on the calling thread. The first
// exception thrown by any item is rethrown after all workers stop.
inline void parallel_for_samples(int n_workers, int n_items,
                                 const std::function<void(int)>& body) {
  require(n_workers >= 1, "pool: worker count must be positive");
  require(n_items >= 0, "pool: negative item count");
  if (n_workers == 1) {
    for (int i = 0; i < n_items; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!first_error) first_error = std::current_exception();
        next.store(n_items);  // drain remaining work
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rnls
