#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mlnoise {

// Seeded random stream with portable draw functions. std::mt19937_64 output is
// specified by the standard, and the uniform/normal transforms below avoid the
// implementation-defined std distributions, so identical (seed, tag) pairs give
// identical sequences on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent substream keyed by (seed, tag, index). Used to give each class
  // its own noise stream so per-class results do not depend on q.
  static Rng substream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, bound) by rejection; exact and portable.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via the polar method.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Fisher-Yates with the portable integer draw.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer; used for seed mixing.
std::uint64_t mix_u64(std::uint64_t x);

}  // namespace mlnoise
