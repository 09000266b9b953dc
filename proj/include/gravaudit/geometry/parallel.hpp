#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gva {

/// Evaluates fn(i) for i in [0, n) on up to `jobs` threads. Results land in
/// index order, so aggregation downstream does not depend on the job count.
/// The exception of the lowest failing index is rethrown after all workers
/// finish.
template <typename Fn>
auto parallel_map(std::size_t n, Fn fn, std::size_t jobs) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  auto work = [&](std::size_t worker) {
    for (std::size_t i = worker; i < n; i += jobs) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace gva
