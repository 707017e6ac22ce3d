#pragma once

// Encoded cell: a labeled DAG with V <= 7 vertices stored as an
// upper-triangular adjacency matrix (one successor bitmask per row).
// Vertex 0 is the input, vertex V-1 the output; the V-2 vertices in
// between carry an operation label.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nasbench/errors.hpp"

namespace nasbench {

enum class Op : std::uint8_t { Conv3x3 = 0, Conv1x1 = 1, MaxPool3x3 = 2 };

inline constexpr int kNumOps = 3;
inline constexpr std::array<Op, kNumOps> kAllOps{Op::Conv3x3, Op::Conv1x1, Op::MaxPool3x3};
inline constexpr int kMaxVertices = 7;
inline constexpr int kMaxEdges = 9;
inline constexpr int kMaxInterior = kMaxVertices - 2;

inline constexpr std::string_view op_name(Op op) {
  switch (op) {
    case Op::Conv3x3: return "CONV3X3";
    case Op::Conv1x1: return "CONV1X1";
    case Op::MaxPool3x3: return "MAXPOOL3X3";
  }
  return "?";
}

inline std::optional<Op> parse_op(std::string_view name) {
  for (Op op : kAllOps)
    if (op_name(op) == name) return op;
  return std::nullopt;
}

class ModelSpec {
 public:
  /// Trivial cell: input connected straight to output.
  ModelSpec() { rows_[0] = 0b10; }

  /// Builds a spec from a square 0/1 matrix and the interior labels.
  /// Invalid cells are representable; only the shape is checked.
  static ModelSpec from_matrix(const std::vector<std::vector<int>>& matrix, std::span<const Op> ops) {
    const int v = static_cast<int>(matrix.size());
    if (v < 2 || v > kMaxVertices) throw StructuralError("matrix side must be in [2, 7]");
    for (const auto& row : matrix)
      if (static_cast<int>(row.size()) != v) throw StructuralError("matrix is not square");
    if (static_cast<int>(ops.size()) != v - 2)
      throw StructuralError("expected " + std::to_string(v - 2) + " operation labels, got " +
                            std::to_string(ops.size()));
    ModelSpec spec = empty(v);
    for (int i = 0; i < v; ++i) {
      for (int j = 0; j < v; ++j) {
        const int bit = matrix[i][j];
        if (bit != 0 && bit != 1) throw StructuralError("matrix entries must be 0 or 1");
        if (bit && i >= j) throw StructuralError("matrix must be strictly upper-triangular");
        if (bit) spec.set_edge(i, j, true);
      }
    }
    for (int k = 0; k < v - 2; ++k) spec.ops_[k] = ops[k];
    return spec;
  }

  /// Edgeless spec with `v` vertices and all interior labels CONV3X3.
  static ModelSpec empty(int v) {
    if (v < 2 || v > kMaxVertices) throw StructuralError("matrix side must be in [2, 7]");
    ModelSpec spec;
    spec.num_vertices_ = static_cast<std::uint8_t>(v);
    spec.rows_.fill(0);
    spec.ops_.fill(Op::Conv3x3);
    return spec;
  }

  int num_vertices() const { return num_vertices_; }
  int output() const { return num_vertices_ - 1; }
  int num_interior() const { return num_vertices_ - 2; }

  bool edge(int i, int j) const { return (rows_[i] >> j) & 1U; }

  void set_edge(int i, int j, bool on) {
    if (i < 0 || j >= num_vertices_ || i >= j) throw StructuralError("edge must satisfy 0 <= i < j < V");
    if (on)
      rows_[i] = static_cast<std::uint8_t>(rows_[i] | (1U << j));
    else
      rows_[i] = static_cast<std::uint8_t>(rows_[i] & ~(1U << j));
  }

  /// Bitmask of successors of vertex i.
  std::uint8_t successors(int i) const { return rows_[i]; }

  /// Bitmask of predecessors of vertex j.
  std::uint8_t predecessors(int j) const {
    std::uint8_t mask = 0;
    for (int i = 0; i < j; ++i)
      if (edge(i, j)) mask = static_cast<std::uint8_t>(mask | (1U << i));
    return mask;
  }

  int num_edges() const {
    int n = 0;
    for (int i = 0; i < num_vertices_; ++i) n += std::popcount(rows_[i]);
    return n;
  }

  std::span<const Op> ops() const { return {ops_.data(), static_cast<std::size_t>(num_interior())}; }

  /// Label of interior vertex `vertex` (1 <= vertex <= V-2).
  Op op(int vertex) const { return ops_[vertex - 1]; }
  void set_op(int vertex, Op op) { ops_[vertex - 1] = op; }

  std::vector<std::vector<int>> matrix() const {
    std::vector<std::vector<int>> m(num_vertices_, std::vector<int>(num_vertices_, 0));
    for (int i = 0; i < num_vertices_; ++i)
      for (int j = 0; j < num_vertices_; ++j) m[i][j] = edge(i, j) ? 1 : 0;
    return m;
  }

  /// Row-major V*V string of '0'/'1'.
  std::string matrix_bits() const {
    std::string bits;
    bits.reserve(num_vertices_ * num_vertices_);
    for (int i = 0; i < num_vertices_; ++i)
      for (int j = 0; j < num_vertices_; ++j) bits.push_back(edge(i, j) ? '1' : '0');
    return bits;
  }

  std::string ops_string() const {
    std::string out;
    for (int k = 0; k < num_interior(); ++k) {
      if (k) out.push_back(',');
      out += op_name(ops_[k]);
    }
    return out;
  }

  /// Lexicographic order on (V, row-major matrix bits, ops).
  friend std::strong_ordering operator<=>(const ModelSpec& a, const ModelSpec& b) {
    if (auto c = a.num_vertices_ <=> b.num_vertices_; c != 0) return c;
    for (int i = 0; i < a.num_vertices_; ++i)
      for (int j = 0; j < a.num_vertices_; ++j)
        if (auto c = a.edge(i, j) <=> b.edge(i, j); c != 0) return c;
    for (int k = 0; k < a.num_interior(); ++k)
      if (auto c = a.ops_[k] <=> b.ops_[k]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) { return (a <=> b) == 0; }

 private:
  std::uint8_t num_vertices_ = 2;
  std::array<std::uint8_t, kMaxVertices> rows_{};
  std::array<Op, kMaxInterior> ops_{};
};

/// Vertices reachable from the input (bitmask, input included).
inline std::uint8_t forward_reachable(const ModelSpec& spec) {
  std::uint8_t seen = 1;
  for (int i = 0; i < spec.num_vertices(); ++i)
    if ((seen >> i) & 1U) seen = static_cast<std::uint8_t>(seen | spec.successors(i));
  return seen;
}

/// Vertices that reach the output (bitmask, output included).
inline std::uint8_t backward_reachable(const ModelSpec& spec) {
  const int out = spec.output();
  std::uint8_t seen = static_cast<std::uint8_t>(1U << out);
  for (int i = out - 1; i >= 0; --i)
    if (spec.successors(i) & seen) seen = static_cast<std::uint8_t>(seen | (1U << i));
  return seen;
}

inline bool has_input_output_path(const ModelSpec& spec) {
  return (forward_reachable(spec) >> spec.output()) & 1U;
}

inline bool is_valid(const ModelSpec& spec) {
  return spec.num_edges() <= kMaxEdges && has_input_output_path(spec);
}

/// True when every vertex lies on an input->output path.
inline bool is_pruned(const ModelSpec& spec) {
  const std::uint8_t all = static_cast<std::uint8_t>((1U << spec.num_vertices()) - 1);
  return (forward_reachable(spec) & backward_reachable(spec)) == all;
}

/// Drops vertices that are not on any input->output path, keeping vertex order.
inline ModelSpec prune(const ModelSpec& spec) {
  if (!is_valid(spec)) throw ValidityError("cannot prune an invalid cell");
  const std::uint8_t live = forward_reachable(spec) & backward_reachable(spec);
  std::array<int, kMaxVertices> remap{};
  int kept = 0;
  for (int i = 0; i < spec.num_vertices(); ++i) remap[i] = ((live >> i) & 1U) ? kept++ : -1;
  if (kept == spec.num_vertices()) return spec;
  ModelSpec out = ModelSpec::empty(kept);
  for (int i = 0; i < spec.num_vertices(); ++i) {
    if (remap[i] < 0) continue;
    for (int j = i + 1; j < spec.num_vertices(); ++j)
      if (remap[j] >= 0 && spec.edge(i, j)) out.set_edge(remap[i], remap[j], true);
    if (i > 0 && i < spec.output()) out.set_op(remap[i], spec.op(i));
  }
  return out;
}

/// `matrix=<bits>;ops=<labels>` text form.
inline std::string to_text(const ModelSpec& spec) {
  return "matrix=" + spec.matrix_bits() + ";ops=" + spec.ops_string();
}

inline ModelSpec parse_spec(std::string_view text) {
  constexpr std::string_view kMatrix = "matrix=";
  constexpr std::string_view kOps = ";ops=";
  if (!text.starts_with(kMatrix)) throw StructuralError("spec text must start with 'matrix='");
  const auto sep = text.find(kOps);
  if (sep == std::string_view::npos) throw StructuralError("spec text lacks ';ops='");
  const std::string_view bits = text.substr(kMatrix.size(), sep - kMatrix.size());
  const std::string_view labels = text.substr(sep + kOps.size());
  int side = 0;
  while (side * side < static_cast<int>(bits.size())) ++side;
  if (side * side != static_cast<int>(bits.size())) throw StructuralError("matrix bit count is not a square");
  std::vector<std::vector<int>> m(side, std::vector<int>(side));
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      const char c = bits[i * side + j];
      if (c != '0' && c != '1') throw StructuralError("matrix bits must be '0' or '1'");
      m[i][j] = c - '0';
    }
  }
  std::vector<Op> ops;
  std::size_t pos = 0;
  while (pos < labels.size()) {
    const auto comma = labels.find(',', pos);
    const auto name = labels.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto op = parse_op(name);
    if (!op) throw StructuralError("unknown operation label '" + std::string(name) + "'");
    ops.push_back(*op);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return ModelSpec::from_matrix(m, ops);
}

}  // namespace nasbench
