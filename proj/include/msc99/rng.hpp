#pragma once

#include <cstdint>
#include <random>

namespace msc99 {

// Seeded random source shared by all sampling code. mt19937_64 is fully
// specified by the C++ standard, so transcripts are bit-exact across
// platforms given the same seed. Monte Carlo drivers derive per-run seeds
// as seed ^ run_index.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  int bit() { return static_cast<int>(gen_() >> 63); }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace msc99
