#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cqed::harness {

/// Runs fn(i) for i in [0, n) on `jobs` threads; results keep index order.
/// The first exception (lowest index) is rethrown after all workers finish.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, int jobs, Fn&& fn) {
  std::vector<Result> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  if (threads == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

} // namespace cqed::harness
