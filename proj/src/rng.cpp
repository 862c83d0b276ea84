#include "tabaudit/rng.hpp"

#include <cmath>
#include <numbers>

#include "tabaudit/error.hpp"

namespace tabaudit {

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = mix64(base);
  for (unsigned char ch : tag) {
    h = mix64(h ^ ch);
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::uint64_t index) {
  return mix64(derive_seed(base, tag) ^ index);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) {
    throw Error("uniform_index: empty range");
  }
  // Reject draws below 2^64 mod n to keep the result exactly uniform.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) {
      return r % n;
    }
  }
}

double Rng::gaussian() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace tabaudit
