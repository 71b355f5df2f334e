#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace shapefit {

inline std::size_t&
thread_cap()
{
  static std::size_t cap = 0; // 0: hardware concurrency
  return cap;
}

inline void
set_thread_cap(std::size_t cap)
{
  thread_cap() = cap;
}

inline std::size_t
worker_count(std::size_t tasks)
{
  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::size_t cap = thread_cap() == 0 ? hw : thread_cap();
  return std::max<std::size_t>(1, std::min({ cap, hw, tasks }));
}

//! Runs fn(i) for i in [0, count). Results must be written to slot i by the
//! callee so that the outcome does not depend on scheduling. The first
//! exception thrown by any task is rethrown after all workers finish.
template<typename Fn>
void
parallel_for(std::size_t count, Fn&& fn)
{
  const std::size_t workers = worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mtx;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mtx);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w)
    pool.emplace_back(body);
  body();
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace shapefit
