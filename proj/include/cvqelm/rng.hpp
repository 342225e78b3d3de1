#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace cvqelm {

// Counter-based deterministic randomness. Every draw is a pure function of
// (key, counter), so streams are reproducible bit-for-bit across platforms
// and independent streams never interact.

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Mix a key with a counter into a single well-scrambled word.
inline std::uint64_t mix(std::uint64_t key, std::uint64_t counter) {
  return splitmix64(splitmix64(key) ^ splitmix64(counter * 0x9e3779b97f4a7c15ull + 1));
}

/// Map a 64-bit word to a double in [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t z) {
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

/// FNV-1a over a byte string; used for seed derivation and digests.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Sequential stream view over the counter-based generator.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix(key_, counter_++); }
  double next_unit() { return to_unit(next_u64()); }
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Standard normal via Box-Muller; consumes two words.
  double next_normal() {
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  /// Integer in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t v = static_cast<std::uint64_t>(next_unit() * static_cast<double>(n));
    return v >= n ? n - 1 : v;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cvqelm
