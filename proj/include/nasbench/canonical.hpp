#pragma once

// Isomorphism-invariant cell hashing.
//
// After pruning, each vertex starts from a hash of (in-degree, out-degree,
// label), with reserved labels for input (-1) and output (-2). For V rounds
// every vertex hash is replaced by the hash of (sorted in-neighbor hashes,
// sorted out-neighbor hashes, own hash). The cell digest is the hash of the
// sorted multiset of final vertex hashes. All hashing is SHA-256 over
// length-prefixed little-endian fields.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>

#include "nasbench/cell_spec.hpp"
#include "nasbench/digest.hpp"

namespace nasbench {

namespace detail {

inline constexpr std::int32_t kInputLabel = -1;
inline constexpr std::int32_t kOutputLabel = -2;

class FieldWriter {
 public:
  void begin_field(std::uint32_t length) { put_u32(length); }

  void put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_[size_++] = static_cast<std::uint8_t>(v >> (8 * i));
  }

  void put_i32_field(std::int32_t v) {
    begin_field(4);
    put_u32(static_cast<std::uint32_t>(v));
  }

  void put_bytes(std::span<const std::uint8_t> bytes) {
    std::copy(bytes.begin(), bytes.end(), buf_.begin() + size_);
    size_ += bytes.size();
  }

  Sha256 digest() const { return sha256({buf_.data(), size_}); }

 private:
  // Largest message: 3 length prefixes + 7 + 7 + 1 hashes.
  std::array<std::uint8_t, 3 * 4 + 15 * sizeof(Sha256)> buf_{};
  std::size_t size_ = 0;
};

inline std::int32_t vertex_label(const ModelSpec& spec, int v) {
  if (v == 0) return kInputLabel;
  if (v == spec.output()) return kOutputLabel;
  return static_cast<std::int32_t>(spec.op(v));
}

/// Writes the sorted hashes of the vertices in `mask` as one field.
inline void put_sorted_hashes(FieldWriter& w, const std::array<Sha256, kMaxVertices>& hashes,
                              std::uint8_t mask) {
  std::array<Sha256, kMaxVertices> picked;
  std::size_t n = 0;
  for (int v = 0; v < kMaxVertices; ++v)
    if ((mask >> v) & 1U) picked[n++] = hashes[v];
  std::sort(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(n));
  w.begin_field(static_cast<std::uint32_t>(n * sizeof(Sha256)));
  for (std::size_t i = 0; i < n; ++i) w.put_bytes(picked[i]);
}

/// Digest of an already-pruned spec.
inline Digest hash_pruned(const ModelSpec& spec) {
  const int n = spec.num_vertices();
  std::array<std::uint8_t, kMaxVertices> preds{};
  for (int v = 0; v < n; ++v) preds[v] = spec.predecessors(v);

  std::array<Sha256, kMaxVertices> hashes{};
  for (int v = 0; v < n; ++v) {
    FieldWriter w;
    w.put_i32_field(std::popcount(preds[v]));
    w.put_i32_field(std::popcount(spec.successors(v)));
    w.put_i32_field(vertex_label(spec, v));
    hashes[v] = w.digest();
  }
  for (int round = 0; round < n; ++round) {
    std::array<Sha256, kMaxVertices> next{};
    for (int v = 0; v < n; ++v) {
      FieldWriter w;
      put_sorted_hashes(w, hashes, preds[v]);
      put_sorted_hashes(w, hashes, spec.successors(v));
      w.begin_field(sizeof(Sha256));
      w.put_bytes(hashes[v]);
      next[v] = w.digest();
    }
    hashes = next;
  }
  FieldWriter w;
  put_sorted_hashes(w, hashes, static_cast<std::uint8_t>((1U << n) - 1));
  return Digest::from_sha(w.digest());
}

/// Applies a relabeling of the interior vertices: old vertex i moves to
/// position perm[i-1]+1. Returns false if the result is not upper-triangular.
inline bool relabel(const ModelSpec& spec, std::span<const int> perm, ModelSpec& out) {
  const int n = spec.num_vertices();
  std::array<int, kMaxVertices> pos{};
  pos[0] = 0;
  pos[n - 1] = n - 1;
  for (int i = 1; i < n - 1; ++i) pos[i] = perm[i - 1] + 1;
  out = ModelSpec::empty(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!spec.edge(i, j)) continue;
      if (pos[i] >= pos[j]) return false;
      out.set_edge(pos[i], pos[j], true);
    }
    if (i > 0 && i < n - 1) out.set_op(pos[i], spec.op(i));
  }
  return true;
}

}  // namespace detail

/// Digest identifying the computational-equivalence class of a valid spec.
inline Digest canonical_hash(const ModelSpec& spec) {
  return detail::hash_pruned(prune(spec));
}

/// Pruned cell in its lexicographically smallest vertex ordering, with digest.
struct CanonicalCell {
  ModelSpec spec;
  Digest digest;

  int num_vertices() const { return spec.num_vertices(); }
  int num_edges() const { return spec.num_edges(); }
};

/// Smallest (matrix bits, ops) among the upper-triangular relabelings of a pruned spec.
inline ModelSpec lexicographic_representative(const ModelSpec& pruned) {
  const int k = pruned.num_interior();
  std::array<int, kMaxInterior> perm{};
  std::iota(perm.begin(), perm.begin() + k, 0);
  ModelSpec best = pruned;
  ModelSpec candidate;
  do {
    if (detail::relabel(pruned, {perm.data(), static_cast<std::size_t>(k)}, candidate) && candidate < best)
      best = candidate;
  } while (std::next_permutation(perm.begin(), perm.begin() + k));
  return best;
}

inline CanonicalCell canonicalize(const ModelSpec& spec) {
  const ModelSpec pruned = prune(spec);
  return {lexicographic_representative(pruned), detail::hash_pruned(pruned)};
}

}  // namespace nasbench
