#include "tsbench/random.hpp"

#include <cmath>
#include <numbers>

namespace tsbench {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix64(seed ^ (mix64(value) + kGolden + (seed << 6) + (seed >> 2)));
}

std::uint64_t RandomSource::next_u64() noexcept {
  ++counter_;
  return mix64(seed_ + counter_ * kGolden);
}

double RandomSource::uniform() noexcept {
  // 53 random mantissa bits mapped to (0, 1].
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t RandomSource::uniform_index(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<unsigned __int128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomSource::normal() noexcept {
  if (spare_) {
    double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  return r * std::cos(angle);
}

void RandomSource::fill_normal(std::span<double> out, double stddev) noexcept {
  for (double& v : out) v = stddev * normal();
}

RandomSource RandomSource::child(std::uint64_t index) const noexcept {
  return RandomSource(hash_combine(seed_, index));
}

std::vector<double> sample_standard_normal(RandomSource& rng, std::size_t n) {
  std::vector<double> out(n);
  rng.fill_normal(out);
  return out;
}

}  // namespace tsbench
