#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace mtad {

/// xoshiro256** (Blackman & Vigna) seeded through SplitMix64.
///
/// Distributions are implemented here rather than with <random> because the
/// standard distributions are implementation-defined, and traces and weight
/// initializations must be identical across platforms for a given seed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  /// Standard normal via Box-Muller (second value is cached).
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Exponential with the given rate.
  double exponential(double rate) noexcept;

  /// Derives an independent stream, e.g. one per trace or per ensemble member.
  SeededRng fork(std::uint64_t stream) const noexcept;

  template <typename T>
  void shuffle(std::vector<T>& items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  std::optional<double> spare_normal_;
};

/// SplitMix64 finalizer, used for seeding and for hashing seeds together.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace mtad
