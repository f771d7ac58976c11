#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tsbench {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of two 64-bit keys.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;

/// Counter-based generator: the i-th output is mix64(seed + i * golden gamma).
///
/// Normals come from Box-Muller pairs; the second value of a pair is kept and
/// returned by the next call, so the normal stream is prefix-consistent no
/// matter how it is chunked across calls. A source is single-owner. Parallel
/// work derives children by index, which depend only on the seed.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open-closed interval (0, 1].
  double uniform() noexcept;
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  double normal() noexcept;
  void fill_normal(std::span<double> out, double stddev = 1.0) noexcept;

  RandomSource child(std::uint64_t index) const noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

std::vector<double> sample_standard_normal(RandomSource& rng, std::size_t n);

}  // namespace tsbench
