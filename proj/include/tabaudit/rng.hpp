#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tabaudit {

// SplitMix64 finalizer, used for seed mixing.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// All randomness flows from one master seed through these derivations:
// derive_seed(master, "partition") for the shadow split shuffle,
// derive_seed(master, "shadow", i) for shadow i's generator,
// derive_seed(seed, "column", c) for attribute predictor c, and so on.
// The tag keeps stages on independent streams even when indices collide.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::uint64_t index);

// mt19937_64 with hand-rolled draws. std::*_distribution sequences are
// implementation-defined; these are pinned, so a seed means the same stream
// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), unbiased via rejection. n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller; always two draws, no caching.
  double gaussian();

 private:
  std::mt19937_64 engine_;
};

}  // namespace tabaudit
