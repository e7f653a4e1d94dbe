#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace weakpde {

// SplitMix64 finalizer. Used both as a seed hash and, applied to a counter,
// as a random-access generator: the n-th draw of stream `seed` is
// splitmix64(seed + (n + 1) * golden), identical to sequential SplitMix64.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t n) noexcept {
  return splitmix64(seed + n * 0x9E3779B97F4A7C15ULL);
}

/// Uniform on [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1], safe as a logarithm argument.
constexpr double to_unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Seed for ensemble member `index` derived from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0xD1B54A32D192ED03ULL));
}

/// Sequential SplitMix64 stream with a Box-Muller normal transform.
/// Fixed algorithm, no rejection loops, identical output on every platform.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    ++counter_;
    return counter_draw(state_, counter_);
  }

  double uniform() noexcept { return to_unit(next()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(to_unit_open(next())));
    return r * std::cos(2.0 * std::numbers::pi * to_unit(next()));
  }

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

}  // namespace weakpde
