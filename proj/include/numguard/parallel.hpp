#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

namespace numguard {

/// Runs body(i) for i in [0, iterations) in chunks, splitting each chunk across
/// `jobs` threads, and hands the produced values to sink(i, value) in index
/// order. The wall-clock budget is only checked between chunks, so the
/// processed iterations always form a prefix. Returns the number processed.
template <typename Result, typename Body, typename Sink>
std::uint64_t run_chunked(std::uint64_t iterations, unsigned jobs, double time_budget_seconds,
                          Body&& body, Sink&& sink, bool* stopped_by_time = nullptr) {
  constexpr std::uint64_t kChunk = 16384;
  const auto start = std::chrono::steady_clock::now();
  jobs = std::max(1u, jobs);
  if (stopped_by_time) *stopped_by_time = false;

  std::vector<Result> results;
  std::uint64_t done = 0;
  while (done < iterations) {
    if (done > 0 && time_budget_seconds > 0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (elapsed.count() >= time_budget_seconds) {
        if (stopped_by_time) *stopped_by_time = true;
        break;
      }
    }
    const std::uint64_t count = std::min(kChunk, iterations - done);
    results.assign(count, Result{});
    auto work = [&](std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t k = lo; k < hi; ++k) results[k] = body(done + k);
    };
    if (jobs == 1 || count < jobs) {
      work(0, count);
    } else {
      std::vector<std::jthread> workers;
      const std::uint64_t per = (count + jobs - 1) / jobs;
      for (unsigned j = 0; j < jobs; ++j) {
        const std::uint64_t lo = std::min<std::uint64_t>(count, j * per);
        const std::uint64_t hi = std::min<std::uint64_t>(count, lo + per);
        if (lo < hi) workers.emplace_back(work, lo, hi);
      }
    }
    for (std::uint64_t k = 0; k < count; ++k) sink(done + k, std::move(results[k]));
    done += count;
  }
  return done;
}

}  // namespace numguard
