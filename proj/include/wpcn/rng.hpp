#pragma once

// Counter-based random streams for Monte Carlo trials.
//
// Trial t under seed S draws from xoshiro256** whose state is filled by
// SplitMix64 started at mix(S) ^ mix(t + golden). Streams therefore depend on
// (S, t) only, never on scheduling. This generator family is fixed; changing
// it changes every published estimate.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wpcn::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next() {
    state_ += kGolden;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

/// Draws used by the samplers. Normals come from Box-Muller and exponentials
/// from -log(U) so results do not depend on the standard library's
/// distribution implementations.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t trial)
      : gen_(splitmix64_mix(seed) ^ splitmix64_mix(trial + kGolden)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(gen_.next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Exponential with mean 1.
  double exponential() { return -std::log(uniform()); }

  /// Standard normal.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  Xoshiro256ss gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wpcn::rng
