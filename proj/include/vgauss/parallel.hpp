#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vgauss {

/// Number of worker threads used by every replication loop. Defaults to 1.
void set_worker_count(unsigned workers);
unsigned worker_count();

/// Streaming mean/variance (Welford), mergeable with Chan's update.
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const RunningStats& other) {
    if (other.count == 0.0) return;
    if (count == 0.0) {
      *this = other;
      return;
    }
    const double total = count + other.count;
    const double delta = other.mean - mean;
    mean += delta * other.count / total;
    m2 += other.m2 + delta * delta * count * other.count / total;
    count = total;
  }

  double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
  double std_error() const { return count > 1.0 ? std::sqrt(variance() / count) : 0.0; }
};

/// Replications are grouped into fixed blocks. Each block is accumulated
/// sequentially and blocks are merged in index order, so the floating-point
/// result is identical for any worker count.
inline constexpr std::size_t kReplicationBlock = 2048;

/// Runs `body(state, rep, acc)` for rep in [0, reps). `make_state()` builds
/// per-worker scratch (buffers, samplers); `Acc` needs default construction
/// and `merge(const Acc&)`.
template <class Acc, class MakeState, class Body>
Acc replicate(std::size_t reps, MakeState make_state, Body body) {
  const std::size_t blocks = (reps + kReplicationBlock - 1) / kReplicationBlock;
  std::vector<Acc> partial(blocks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      auto state = make_state();
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= blocks) break;
        const std::size_t lo = b * kReplicationBlock;
        const std::size_t hi = std::min(reps, lo + kReplicationBlock);
        for (std::size_t r = lo; r < hi; ++r) body(state, r, partial[b]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(blocks);
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, worker_count()), std::max<std::size_t>(blocks, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  Acc total{};
  for (const Acc& p : partial) total.merge(p);
  return total;
}

}  // namespace vgauss
