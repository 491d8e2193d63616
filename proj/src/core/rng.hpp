#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace exhurst {

// SplitMix64 output function (Steele, Lea & Flood 2014). Also used as the
// seed-mixing primitive below.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, stream). Documented scheme:
//   mix(a, b) = splitmix64_mix(splitmix64_mix(a + GOLDEN) ^ (b + GOLDEN*2))
// so replication r of scenario s uses mix(mix(master, s), r); adding streams
// never perturbs existing ones.
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64_mix(splitmix64_mix(a + kGoldenGamma) ^ (b + 2 * kGoldenGamma));
}

// Counter-based SplitMix64 generator: state advances by the golden gamma,
// output is the finalizer of the state. Passes BigCrush; trivially seekable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return splitmix64_mix(state_);
  }

  // Uniform on [0, 1), 53-bit mantissa.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Standard normal draws via Box-Muller on SplitMix64 uniforms. Deterministic
// for a fixed seed independent of the C++ standard library in use.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) noexcept : rng_(seed) {}

  double next() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - rng_.uniform01();  // (0, 1], keeps log finite
    const double u2 = rng_.uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace exhurst
