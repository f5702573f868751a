#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bpire {

// Deterministic parallelism contract: work is split into exactly `blocks`
// chunks, each chunk owns its own RNG stream, and the chunk results are
// combined by a fixed pairwise tree. The outcome depends on (seed, blocks)
// only, never on thread scheduling or the number of hardware threads.

struct BlockRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;  // half-open
  std::uint64_t count() const { return end - begin; }
};

inline std::vector<BlockRange> partition_blocks(std::uint64_t total,
                                                unsigned blocks) {
  if (blocks == 0) throw std::invalid_argument("partition_blocks: blocks=0");
  std::vector<BlockRange> out(blocks);
  const std::uint64_t base = total / blocks;
  const std::uint64_t extra = total % blocks;
  std::uint64_t pos = 0;
  for (unsigned b = 0; b < blocks; ++b) {
    const std::uint64_t len = base + (b < extra ? 1 : 0);
    out[b] = {pos, pos + len};
    pos += len;
  }
  return out;
}

// Runs fn(block_index) for every block, possibly on several threads, and
// stores the results in block order.
template <typename Result, typename Fn>
std::vector<Result> run_blocks(unsigned blocks, Fn&& fn) {
  std::vector<Result> results(blocks);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = std::min(blocks, hw);
  if (nthreads <= 1) {
    for (unsigned b = 0; b < blocks; ++b) results[b] = fn(b);
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (unsigned b = t; b < blocks; b += nthreads) results[b] = fn(b);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

// Fixed-tree pairwise reduction: combine(a, b) is applied bottom-up over
// adjacent pairs, identically for any thread count.
template <typename T, typename Combine>
T pairwise_reduce(std::vector<T> items, Combine&& combine) {
  if (items.empty()) throw std::invalid_argument("pairwise_reduce: empty");
  while (items.size() > 1) {
    std::vector<T> next;
    next.reserve((items.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < items.size(); i += 2)
      next.push_back(combine(items[i], items[i + 1]));
    if (items.size() % 2 == 1) next.push_back(items.back());
    items = std::move(next);
  }
  return items.front();
}

// Streaming mean/variance accumulator with a deterministic parallel merge
// (Chan's formula), used for every Monte Carlo standard error in the tool.
struct MeanVar {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  static MeanVar merge(const MeanVar& a, const MeanVar& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    MeanVar out;
    out.n = a.n + b.n;
    const double d = b.mean - a.mean;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    out.mean = a.mean + d * nb / static_cast<double>(out.n);
    out.m2 = a.m2 + b.m2 + d * d * na * nb / static_cast<double>(out.n);
    return out;
  }

  double variance() const {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }
  double std_error() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

}  // namespace bpire
