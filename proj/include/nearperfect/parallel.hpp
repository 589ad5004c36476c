#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace nearperfect {

// Splits [lo, hi) into consecutive chunks of at most segment_size and runs
// work(seg_lo, seg_hi) on a pool of worker threads. Results are handed to
// merge(seg_lo, seg_hi, result) on the calling thread in ascending segment
// order regardless of completion order, so the merged output is identical
// to a sequential run.
template <class Work, class Merge>
void run_segments_ordered(std::uint64_t lo, std::uint64_t hi, std::uint64_t segment_size,
                          unsigned workers, Work&& work, Merge&& merge) {
  using Result = std::invoke_result_t<Work&, std::uint64_t, std::uint64_t>;
  if (segment_size == 0) throw std::invalid_argument("run_segments_ordered: segment_size = 0");
  if (lo >= hi) return;
  const std::uint64_t count = (hi - lo + segment_size - 1) / segment_size;
  const auto seg_lo = [&](std::uint64_t i) { return lo + i * segment_size; };
  const auto seg_hi = [&](std::uint64_t i) { return std::min(hi, seg_lo(i) + segment_size); };

  if (workers <= 1 || count == 1) {
    for (std::uint64_t i = 0; i < count; ++i) merge(seg_lo(i), seg_hi(i), work(seg_lo(i), seg_hi(i)));
    return;
  }

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::uint64_t, Result> done;  // guarded by mu
  std::exception_ptr first_error;        // guarded by mu
  bool abort = false;                    // guarded by mu
  std::atomic<std::uint64_t> next{0};

  const auto run_worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      {
        std::lock_guard lk(mu);
        if (abort) return;
      }
      try {
        Result r = work(seg_lo(i), seg_hi(i));
        {
          std::lock_guard lk(mu);
          done.emplace(i, std::move(r));
        }
        cv.notify_all();
      } catch (...) {
        {
          std::lock_guard lk(mu);
          if (!first_error) first_error = std::current_exception();
          abort = true;
        }
        cv.notify_all();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_worker);

  std::exception_ptr merge_error;
  {
    std::unique_lock lk(mu);
    for (std::uint64_t i = 0; i < count; ++i) {
      cv.wait(lk, [&] { return abort || done.contains(i); });
      if (!done.contains(i)) break;  // aborted with this segment missing
      auto node = done.extract(i);
      lk.unlock();
      try {
        merge(seg_lo(i), seg_hi(i), std::move(node.mapped()));
      } catch (...) {
        merge_error = std::current_exception();
        lk.lock();
        abort = true;
        break;
      }
      lk.lock();
    }
  }
  for (auto& t : pool) t.join();
  if (merge_error) std::rethrow_exception(merge_error);
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nearperfect
