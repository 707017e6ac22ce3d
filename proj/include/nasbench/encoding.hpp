#pragma once

// Operations on the fixed 7-vertex encoding: 21 edge bits in row-major
// upper-triangular order plus 5 interior labels. Smaller specs are embedded
// by inserting isolated CONV3X3 vertices just before the output.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "nasbench/canonical.hpp"
#include "nasbench/cell_spec.hpp"
#include "nasbench/errors.hpp"
#include "nasbench/rng.hpp"

namespace nasbench {

inline constexpr int kEncodedEdges = kMaxVertices * (kMaxVertices - 1) / 2;  // 21
inline constexpr int kEncodedPositions = kEncodedEdges + kMaxInterior;     // 26
inline constexpr std::uint64_t kRawEncodingCount = (std::uint64_t{1} << kEncodedEdges) * 243;

static_assert(kRawEncodingCount == 509'607'936);

struct EdgeSlot {
  int from;
  int to;
};

inline constexpr std::array<EdgeSlot, kEncodedEdges> kEdgeSlots = [] {
  std::array<EdgeSlot, kEncodedEdges> slots{};
  int k = 0;
  for (int i = 0; i < kMaxVertices; ++i)
    for (int j = i + 1; j < kMaxVertices; ++j) slots[k++] = {i, j};
  return slots;
}();

/// Embeds a spec into the 7-vertex encoding.
inline ModelSpec pad_to_encoding(const ModelSpec& spec) {
  const int n = spec.num_vertices();
  if (n == kMaxVertices) return spec;
  ModelSpec out = ModelSpec::empty(kMaxVertices);
  auto place = [&](int v) { return v == n - 1 ? kMaxVertices - 1 : v; };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      if (spec.edge(i, j)) out.set_edge(place(i), place(j), true);
    if (i > 0 && i < n - 1) out.set_op(i, spec.op(i));
  }
  return out;
}

/// 21-bit edge mask of a 7-vertex spec (bit k = kEdgeSlots[k]).
inline std::uint32_t edge_bits(const ModelSpec& encoded) {
  std::uint32_t bits = 0;
  for (int k = 0; k < kEncodedEdges; ++k)
    if (encoded.edge(kEdgeSlots[k].from, kEdgeSlots[k].to)) bits |= 1U << k;
  return bits;
}

inline ModelSpec spec_from_encoding(std::uint32_t edges, std::span<const Op> ops) {
  ModelSpec out = ModelSpec::empty(kMaxVertices);
  for (int k = 0; k < kEncodedEdges; ++k)
    if ((edges >> k) & 1U) out.set_edge(kEdgeSlots[k].from, kEdgeSlots[k].to, true);
  for (int v = 1; v <= kMaxInterior; ++v) out.set_op(v, ops[v - 1]);
  return out;
}

/// Hamming distance over edge bits plus number of differing labels.
inline int encoding_distance(const ModelSpec& a, const ModelSpec& b) {
  const ModelSpec pa = pad_to_encoding(a);
  const ModelSpec pb = pad_to_encoding(b);
  int d = std::popcount(edge_bits(pa) ^ edge_bits(pb));
  for (int v = 1; v <= kMaxInterior; ++v) d += pa.op(v) != pb.op(v);
  return d;
}

/// Minimum encoding distance over the upper-triangular relabelings of b's
/// interior slots. Zero for isomorphic encodings.
inline int canonical_distance(const ModelSpec& a, const ModelSpec& b) {
  if (!is_valid(a) || !is_valid(b)) throw ValidityError("canonical_distance requires valid cells");
  const ModelSpec pa = pad_to_encoding(a);
  const ModelSpec pb = pad_to_encoding(b);
  const std::uint32_t ea = edge_bits(pa);
  std::array<int, kMaxInterior> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  int best = encoding_distance(pa, pb);
  ModelSpec candidate;
  do {
    if (!detail::relabel(pb, perm, candidate)) continue;
    int d = std::popcount(ea ^ edge_bits(candidate));
    for (int v = 1; v <= kMaxInterior; ++v) d += pa.op(v) != candidate.op(v);
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Valid encodings at encoding distance exactly 1, edge flips first then label changes.
inline std::vector<ModelSpec> neighbors(const ModelSpec& spec) {
  if (!is_valid(spec)) throw ValidityError("neighbors requires a valid cell");
  const ModelSpec base = pad_to_encoding(spec);
  std::vector<ModelSpec> out;
  out.reserve(kEncodedEdges + 2 * kMaxInterior);
  for (const auto& slot : kEdgeSlots) {
    ModelSpec n = base;
    n.set_edge(slot.from, slot.to, !base.edge(slot.from, slot.to));
    if (is_valid(n)) out.push_back(n);
  }
  for (int v = 1; v <= kMaxInterior; ++v) {
    for (Op op : kAllOps) {
      if (op == base.op(v)) continue;
      ModelSpec n = base;
      n.set_op(v, op);
      out.push_back(n);
    }
  }
  return out;
}

/// One raw mutation proposal: uniformly pick one of the 26 positions, flip
/// the edge or resample the label from the two other labels. The child may
/// be invalid. `position` is the chosen index (edges 0..20, labels 21..25).
struct MutationProposal {
  ModelSpec child;
  int position;
};

inline MutationProposal propose_mutation(const ModelSpec& parent, Rng& rng) {
  ModelSpec child = pad_to_encoding(parent);
  const int position = rng.below_int(kEncodedPositions);
  if (position < kEncodedEdges) {
    const auto& slot = kEdgeSlots[position];
    child.set_edge(slot.from, slot.to, !child.edge(slot.from, slot.to));
  } else {
    const int vertex = position - kEncodedEdges + 1;
    const int current = static_cast<int>(child.op(vertex));
    const int shift = 1 + rng.below_int(kNumOps - 1);
    child.set_op(vertex, static_cast<Op>((current + shift) % kNumOps));
  }
  return {child, position};
}

inline constexpr int kMutationRetries = 10'000;

/// Mutates until a child accepted by `accept` is found.
template <typename Accept>
ModelSpec mutate_if(const ModelSpec& parent, Rng& rng, Accept&& accept) {
  for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
    MutationProposal p = propose_mutation(parent, rng);
    if (is_valid(p.child) && accept(p.child)) return p.child;
  }
  throw MutationError("no acceptable mutation after 10000 attempts");
}

inline ModelSpec mutate(const ModelSpec& parent, Rng& rng) {
  if (!is_valid(parent)) throw ValidityError("mutate requires a valid cell");
  return mutate_if(parent, rng, [](const ModelSpec&) { return true; });
}

/// Uniform draw over all 2^21 * 3^5 encodings, without rejection.
inline ModelSpec random_encoding(Rng& rng) {
  const auto edges = static_cast<std::uint32_t>(rng.next() & ((1U << kEncodedEdges) - 1));
  std::array<Op, kMaxInterior> ops{};
  for (auto& op : ops) op = kAllOps[rng.below_int(kNumOps)];
  return spec_from_encoding(edges, ops);
}

/// Uniform over valid encodings (rejection sampling).
inline ModelSpec random_spec(Rng& rng) {
  for (;;) {
    ModelSpec s = random_encoding(rng);
    if (is_valid(s)) return s;
  }
}

struct ContinuousEncoding {
  std::array<double, kEncodedEdges> edge_scores{};
  int num_edges = 0;
  std::array<Op, kMaxInterior> ops{};
};

/// Keeps the `num_edges` highest-scoring edges; ties go to the lower edge index.
inline ModelSpec decode_continuous(const ContinuousEncoding& enc) {
  if (enc.num_edges < 0 || enc.num_edges > kMaxEdges) throw StructuralError("num_edges must be in [0, 9]");
  for (double s : enc.edge_scores)
    if (!(s >= 0.0 && s <= 1.0)) throw StructuralError("edge scores must lie in [0, 1]");
  std::array<int, kEncodedEdges> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return enc.edge_scores[a] > enc.edge_scores[b]; });
  std::uint32_t edges = 0;
  for (int k = 0; k < enc.num_edges; ++k) edges |= 1U << order[k];
  return spec_from_encoding(edges, enc.ops);
}

/// A set of 7-vertex encodings sharing edges and the labels of occupied
/// slots; labels of the isolated slots in `free_slots` are arbitrary.
struct EncodingPattern {
  std::uint32_t edges = 0;
  std::array<Op, kMaxInterior> ops{};
  std::uint8_t free_slots = 0;  // bit v-1 set => slot v is isolated padding

  friend auto operator<=>(const EncodingPattern&, const EncodingPattern&) = default;
};

/// All distinct embeddings of a pruned cell into the 7-vertex encoding in
/// which the cell's vertices keep their edges and the remaining slots are
/// isolated. Each pattern stands for 3^popcount(free_slots) encodings.
inline std::vector<EncodingPattern> encoding_patterns(const ModelSpec& cell) {
  const ModelSpec pruned = prune(cell);
  const int n = pruned.num_vertices();
  const int k = pruned.num_interior();
  std::set<EncodingPattern> found;
  // Choose an ordered placement of the k interior vertices into slots 1..5.
  std::array<int, kMaxInterior> slots{};
  std::iota(slots.begin(), slots.end(), 1);
  do {
    // Each distinct prefix of length k appears (5-k)! times; the set dedups.
    std::array<int, kMaxVertices> pos{};
    pos[0] = 0;
    pos[n - 1] = kMaxVertices - 1;
    for (int i = 1; i <= k; ++i) pos[i] = slots[i - 1];
    bool ok = true;
    EncodingPattern p;
    std::uint8_t occupied = 0;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!pruned.edge(i, j)) continue;
        if (pos[i] >= pos[j]) {
          ok = false;
          break;
        }
        for (int e = 0; e < kEncodedEdges; ++e)
          if (kEdgeSlots[e].from == pos[i] && kEdgeSlots[e].to == pos[j]) p.edges |= 1U << e;
      }
      if (i > 0 && i < n - 1) {
        p.ops[pos[i] - 1] = pruned.op(i);
        occupied = static_cast<std::uint8_t>(occupied | (1U << (pos[i] - 1)));
      }
    }
    if (!ok) continue;
    p.free_slots = static_cast<std::uint8_t>(~occupied & 0x1F);
    for (int v = 0; v < kMaxInterior; ++v)
      if ((p.free_slots >> v) & 1U) p.ops[v] = Op::Conv3x3;
    found.insert(p);
  } while (std::next_permutation(slots.begin(), slots.end()));
  return {found.begin(), found.end()};
}

/// Number of distinct 7-vertex encodings that embed the cell with isolated
/// padding (free padding labels counted).
inline std::uint64_t encoding_multiplicity(const ModelSpec& cell) {
  if (!is_valid(cell)) throw ValidityError("encoding_multiplicity requires a valid cell");
  std::uint64_t total = 0;
  for (const auto& p : encoding_patterns(cell)) {
    std::uint64_t variants = 1;
    for (int v = 0; v < std::popcount(p.free_slots); ++v) variants *= kNumOps;
    total += variants;
  }
  return total;
}

/// Distance from a 7-vertex encoding to the closest member of a pattern.
inline int pattern_distance(std::uint32_t edges, std::span<const Op> ops, const EncodingPattern& p) {
  int d = std::popcount(edges ^ p.edges);
  for (int v = 0; v < kMaxInterior; ++v)
    if (!((p.free_slots >> v) & 1U) && ops[v] != p.ops[v]) ++d;
  return d;
}

}  // namespace nasbench
