// Counter-based random numbers (splitmix64 keyed by seed and stream) and a
// sharded parallel loop whose results do not depend on the worker count.
#pragma once

#include <cstdint>
#include <functional>

namespace kahlerdyn {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix64(seed ^ splitmix64(stream))) {}

  std::uint64_t next() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * (++counter_)); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long long integer(long long lo, long long hi) {
    return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Runs body(shard) for shard in [0, shards) on up to `workers` threads
/// (0 = hardware concurrency). Callers reduce per-shard results in index order.
void parallel_for_shards(long long shards, const std::function<void(long long)>& body, int workers = 0);

}  // namespace kahlerdyn
