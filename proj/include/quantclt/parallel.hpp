#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace quantclt {

// Runs fn(i) for i in [0, count). Work items must write only to their own
// slots; the chunked atomic counter makes scheduling irrelevant to results.
inline void parallel_for(long long count, int threads, const std::function<void(long long)>& fn) {
  if (count <= 0) return;
  const int workers = std::max<int>(1, static_cast<int>(std::min<long long>(threads, count)));
  if (workers == 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const long long chunk = std::max<long long>(1, count / (8LL * workers));

  auto worker = [&]() {
    for (;;) {
      const long long begin = next.fetch_add(chunk);
      if (begin >= count) return;
      const long long end = std::min(count, begin + chunk);
      try {
        for (long long i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace quantclt
