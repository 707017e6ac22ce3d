#pragma once

// Deterministic, platform-independent random streams.
//
// The generator is SplitMix64: state += 0x9e3779b97f4a7c15, output is the
// state passed through the SplitMix64 finalizer. Derived streams are seeded
// by mixing the parent seed with a 64-bit FNV-1a hash of a purpose string
// and an index, so (seed, purpose, index) always names the same stream.
// Distributions are implemented here rather than with <random> because the
// standard distributions are implementation-defined.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <utility>

namespace nasbench {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Combines a sequence of words into one well-mixed 64-bit key.
inline constexpr std::uint64_t hash_words(std::span<const std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w + 0x9e3779b97f4a7c15ULL));
  return h;
}

/// Maps a 64-bit key to a double in [0, 1) using its top 53 bits.
inline constexpr double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard normal deviate fully determined by `key` (Box-Muller on two derived words).
inline double normal_from_key(std::uint64_t key) {
  const double u1 = unit_from_bits(mix64(key ^ 0x5851f42d4c957f2dULL));
  const double u2 = unit_from_bits(mix64(key + 0x14057b7ef767814fULL));
  const double r = std::sqrt(-2.0 * std::log1p(-u1));  // 1 - u1 in (0, 1]
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed = 0) : state_(seed) {}

  /// Independent stream named by (seed, purpose, index).
  static constexpr Rng stream(std::uint64_t seed, std::string_view purpose,
                              std::uint64_t index = 0) {
    const std::array<std::uint64_t, 3> words{seed, fnv1a64(purpose), index};
    return Rng(hash_words(words));
  }

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform integer in [0, n). Unbiased (rejection on the short tail).
  constexpr std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  constexpr int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  constexpr double uniform() { return unit_from_bits(next()); }

  constexpr bool coin() { return (next() >> 63) != 0; }

  double normal() { return normal_from_key(next()); }

  /// Child stream; advances this generator by one draw.
  constexpr Rng split() { return Rng(mix64(next() ^ 0x6a09e667f3bcc909ULL)); }

  constexpr std::uint64_t state() const { return state_; }

  friend constexpr bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
constexpr void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace nasbench
