#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ebmz {

// SplitMix64 finalizer; the building block of the seed-derivation scheme.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and up to two indices.
// Used for per-trial sub-seeds so that replication is order-independent:
// trial k's stream never depends on how many trials ran before it.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ (a + 0x9E3779B97F4A7C15ull));
  h = splitmix64(h ^ (b + 0xD1B54A32D192ED03ull));
  return h;
}

// Seeded stream with fully specified output. mt19937_64 is defined bit-for-bit
// by the standard; the uniform and normal transforms below are hand-rolled
// because the std::*_distribution classes are implementation-defined.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_open01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Consumes exactly two engine outputs.
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ebmz
