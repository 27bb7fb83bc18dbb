#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gapcs {

/// Stream ids used to keep matrix/signal/noise draws independent per seed.
enum : std::uint64_t {
  kMatrixStream = 1,
  kSignalStream = 2,
  kNoiseStream = 3,
};

/// Seedable 64-bit generator with (seed, stream) splitting.
///
/// The engine is std::mt19937_64, whose output sequence is pinned by the
/// standard, so identical (seed, stream) pairs reproduce identical draws on
/// any conforming implementation. Gaussian and bounded-integer draws are
/// derived here rather than through std::*_distribution, whose outputs are
/// implementation-defined.
class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed & 0xffffffffu),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream & 0xffffffffu),
        static_cast<std::uint32_t>(stream >> 32),
    };
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  /// Unbiased uniform integer in [0, n); rejection sampling.
  int uniform_int(int n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<int>(x % un);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gapcs
