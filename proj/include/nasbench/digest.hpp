#pragma once

#include <openssl/sha.h>

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace nasbench {

using Sha256 = std::array<std::uint8_t, SHA256_DIGEST_LENGTH>;

inline Sha256 sha256(std::span<const std::uint8_t> bytes) {
  Sha256 out;
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

/// 128-bit cell identity: a SHA-256 digest truncated to its first 16 bytes.
/// Ordering is bytewise, which matches ordering of the lowercase hex form.
struct Digest {
  std::array<std::uint8_t, 16> bytes{};

  static Digest from_sha(const Sha256& full) {
    Digest d;
    std::memcpy(d.bytes.data(), full.data(), d.bytes.size());
    return d;
  }

  std::string hex() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s(32, '0');
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      s[2 * i] = kHex[bytes[i] >> 4];
      s[2 * i + 1] = kHex[bytes[i] & 0xF];
    }
    return s;
  }

  /// Parses exactly 32 lowercase hex characters.
  static std::optional<Digest> from_hex(std::string_view text) {
    if (text.size() != 32) return std::nullopt;
    auto nibble = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      return -1;
    };
    Digest d;
    for (std::size_t i = 0; i < d.bytes.size(); ++i) {
      const int hi = nibble(text[2 * i]);
      const int lo = nibble(text[2 * i + 1]);
      if (hi < 0 || lo < 0) return std::nullopt;
      d.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return d;
  }

  /// First / second 64-bit halves, big-endian.
  std::uint64_t high() const { return load(0); }
  std::uint64_t low() const { return load(8); }

  friend auto operator<=>(const Digest&, const Digest&) = default;

 private:
  std::uint64_t load(std::size_t offset) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = v << 8 | bytes[offset + i];
    return v;
  }
};

}  // namespace nasbench

template <>
struct std::hash<nasbench::Digest> {
  std::size_t operator()(const nasbench::Digest& d) const noexcept { return d.high() ^ (d.low() * 31); }
};
