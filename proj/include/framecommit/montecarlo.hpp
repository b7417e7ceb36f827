#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <vector>

#include "framecommit/so3.hpp"

namespace framecommit {

/// Fixed shard count: results depend on (trials, seed) only, never on the
/// number of hardware threads.
inline constexpr int kMonteCarloShards = 8;

/// z for a two-sided 99% interval.
inline constexpr double kZ99 = 2.5758293035489004;

inline Rng shard_rng(std::uint64_t seed, int shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(shard)};
  return Rng(seq);
}

/// Binomial estimate with a Wilson score interval.
struct Estimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  /// Binomial standard error sqrt(p(1-p)/n) at probability p.
  static double sigma(double p, std::uint64_t n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  }

  /// |mean - p| <= k sigma(p). A zero-variance p demands an exact match.
  bool agrees_with(double p, double k) const {
    return std::abs(mean - p) <= k * sigma(p, trials) + 1e-12;
  }
};

inline Estimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double z = kZ99) {
  Estimate e;
  e.successes = successes;
  e.trials = trials;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  e.mean = p;
  e.lower = std::max(0.0, centre - half);
  e.upper = std::min(1.0, centre + half);
  return e;
}

/// Runs `trial(rng) -> bool` `trials` times across fixed shards with
/// independent seeded streams and returns the success count. `trial` must be
/// safe to call concurrently.
template <typename Trial>
std::uint64_t count_successes(std::uint64_t trials, std::uint64_t seed, const Trial& trial) {
  std::vector<std::future<std::uint64_t>> shards;
  for (int s = 0; s < kMonteCarloShards; ++s) {
    const std::uint64_t share =
        trials / kMonteCarloShards + (static_cast<std::uint64_t>(s) < trials % kMonteCarloShards ? 1 : 0);
    shards.push_back(std::async(std::launch::async, [&trial, seed, s, share] {
      Rng rng = shard_rng(seed, s);
      std::uint64_t hits = 0;
      for (std::uint64_t t = 0; t < share; ++t) hits += trial(rng) ? 1 : 0;
      return hits;
    }));
  }
  std::uint64_t total = 0;
  for (auto& f : shards) total += f.get();
  return total;
}

template <typename Trial>
Estimate monte_carlo(std::uint64_t trials, std::uint64_t seed, const Trial& trial) {
  return wilson_estimate(count_successes(trials, seed, trial), trials);
}

}  // namespace framecommit
