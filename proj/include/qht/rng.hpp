#pragma once

#include <cmath>
#include <cstdint>

namespace qht {

// Counter-based generator: every draw is a pure function of
// (seed, trial, step, lane), so trials are order- and scheduling-independent.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t trial, std::uint64_t step, std::uint64_t lane = 0) const {
    std::uint64_t h = seed_;
    h = mix(h + kGamma * (trial + 1));
    h = mix(h + kGamma * (step + 1));
    h = mix(h + kGamma * (lane + 1));
    return h;
  }

  // uniform in [0, 1) with 53 random bits
  double uniform(std::uint64_t trial, std::uint64_t step, std::uint64_t lane = 0) const {
    return static_cast<double>(bits(trial, step, lane) >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller on lanes (lane, lane+1)
  double normal(std::uint64_t trial, std::uint64_t step, std::uint64_t lane = 0) const {
    double u1 = uniform(trial, step, lane);
    double u2 = uniform(trial, step, lane + 1);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // SplitMix64 finaliser
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t seed_;
};

}  // namespace qht
