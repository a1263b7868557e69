#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace mimobc {

/// Counter-based random stream. A 64-bit key selects the stream and a Weyl
/// counter walks it, so every draw is a pure function of (key, draw index).
/// Streams keyed by (master seed, trial, user) are statistically independent,
/// which keeps parallel runs bitwise reproducible regardless of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(mix(key ^ 0x9E3779B97F4A7C15ull)) {}

  static RngStream channel_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t user) {
    return RngStream(mix(mix(seed ^ 0xA24BAED4963EE407ull) + trial) + mix(user ^ 0x9FB21C651E98DF25ull));
  }

  static RngStream task_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag) {
    return RngStream(mix(mix(seed ^ 0xD1B54A32D192ED03ull) + tag) + mix(trial ^ 0x8CB92BA72F3D8DD7ull));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n >= 1. Rejection keeps the draw exact.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller (second draw cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly symmetric complex Gaussian with unit total variance:
  /// real and imaginary parts are i.i.d. N(0, 1/2).
  std::complex<double> cgaussian() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mimobc
