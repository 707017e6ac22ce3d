#pragma once

// Network plan for a cell stacked into the fixed skeleton:
//
//   stem 3x3 conv (3 -> stem_channels)
//   num_stacks x [cells_per_stack cells], 2x2 max-pool downsample between stacks
//   global average pool, dense layer to num_classes
//
// Cell outputs in stack s have stem_channels * 2^s channels. Inside a cell,
// edges leaving the input go through a 1x1 projection, interior vertices
// sum their inputs (wider sources truncated to the vertex width), and the
// output concatenates its interior sources and adds a projected input when
// the input feeds the output directly.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nasbench/cell_spec.hpp"
#include "nasbench/errors.hpp"

namespace nasbench {

struct SkeletonConfig {
  int stem_channels = 128;
  int cells_per_stack = 3;
  int num_stacks = 3;
  int num_classes = 10;

  void validate() const {
    if (stem_channels < 1 || cells_per_stack < 1 || num_stacks < 1 || num_classes < 1)
      throw PreconditionError("skeleton parameters must be positive");
  }
};

enum class LayerKind {
  Stem,
  Projection,
  Conv3x3,
  Conv1x1,
  MaxPool3x3,
  Truncate,
  Sum,
  Concat,
  Downsample,
  GlobalAvgPool,
  Dense,
};

inline constexpr std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Stem: return "stem";
    case LayerKind::Projection: return "projection";
    case LayerKind::Conv3x3: return "conv3x3";
    case LayerKind::Conv1x1: return "conv1x1";
    case LayerKind::MaxPool3x3: return "maxpool3x3";
    case LayerKind::Truncate: return "truncate";
    case LayerKind::Sum: return "sum";
    case LayerKind::Concat: return "concat";
    case LayerKind::Downsample: return "downsample";
    case LayerKind::GlobalAvgPool: return "global_avg_pool";
    case LayerKind::Dense: return "dense";
  }
  return "?";
}

struct Layer {
  LayerKind kind;
  int c_in;
  int c_out;
  int kernel = 0;  // spatial kernel size, 0 for combine layers
  int arity = 1;   // number of merged tensors for Sum / Concat
  int cell = -1;   // cell index within the network, -1 outside cells
  int vertex = -1; // destination vertex within the cell
};

struct CellPlan {
  int c_in;
  int c_out;
  std::vector<int> vertex_channels;
  std::vector<int> concat_widths;  // widths of interior tensors concatenated into the output
};

struct NetworkPlan {
  std::vector<Layer> layers;
  std::vector<CellPlan> cells;
};

/// Trainable parameters of one layer: k*k*c_in*c_out conv weights (no bias)
/// plus 2*c_out batch-norm parameters; dense layers carry a bias.
inline std::int64_t layer_parameters(const Layer& layer) {
  const std::int64_t ci = layer.c_in, co = layer.c_out;
  switch (layer.kind) {
    case LayerKind::Stem:
    case LayerKind::Conv3x3:
    case LayerKind::Conv1x1:
    case LayerKind::Projection:
      return std::int64_t{layer.kernel} * layer.kernel * ci * co + 2 * co;
    case LayerKind::Dense:
      return ci * co + co;
    default:
      return 0;
  }
}

/// Channel width of every vertex of a pruned cell.
inline std::vector<int> vertex_channels(const ModelSpec& cell, int c_in, int c_out) {
  if (c_in < 1 || c_out < 1) throw PreconditionError("channel counts must be positive");
  const int n = cell.num_vertices();
  const int out = n - 1;
  std::vector<int> channels(n, 0);
  channels[0] = c_in;
  channels[out] = c_out;
  if (n == 2) return channels;

  int feeding = 0;
  for (int v = 1; v < out; ++v) feeding += cell.edge(v, out);
  if (feeding == 0) throw PreconditionError("no interior vertex feeds the output");

  const int share = c_out / feeding;
  int extra = c_out % feeding;
  for (int v = 1; v < out; ++v) {
    if (!cell.edge(v, out)) continue;
    channels[v] = share + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
  }
  for (int v = out - 1; v >= 1; --v) {
    if (cell.edge(v, out)) continue;
    for (int dst = v + 1; dst < out; ++dst)
      if (cell.edge(v, dst)) channels[v] = std::max(channels[v], channels[dst]);
  }
  return channels;
}

namespace detail {

inline LayerKind op_layer(Op op) {
  switch (op) {
    case Op::Conv3x3: return LayerKind::Conv3x3;
    case Op::Conv1x1: return LayerKind::Conv1x1;
    case Op::MaxPool3x3: return LayerKind::MaxPool3x3;
  }
  return LayerKind::Conv3x3;
}

inline int op_kernel(Op op) { return op == Op::Conv1x1 ? 1 : 3; }

inline CellPlan append_cell(const ModelSpec& cell, int c_in, int c_out, int cell_id, std::vector<Layer>& layers) {
  const int n = cell.num_vertices();
  const int out = n - 1;
  CellPlan plan{c_in, c_out, vertex_channels(cell, c_in, c_out), {}};
  const auto& ch = plan.vertex_channels;

  for (int t = 1; t < out; ++t) {
    int arity = 0;
    if (cell.edge(0, t)) {
      layers.push_back({LayerKind::Projection, c_in, ch[t], 1, 1, cell_id, t});
      ++arity;
    }
    for (int src = 1; src < t; ++src) {
      if (!cell.edge(src, t)) continue;
      if (ch[src] < ch[t]) throw PreconditionError("interior source narrower than destination");
      if (ch[src] > ch[t]) layers.push_back({LayerKind::Truncate, ch[src], ch[t], 0, 1, cell_id, t});
      ++arity;
    }
    if (arity > 1) layers.push_back({LayerKind::Sum, ch[t], ch[t], 0, arity, cell_id, t});
    const Op op = cell.op(t);
    layers.push_back({op_layer(op), ch[t], ch[t], op_kernel(op), 1, cell_id, t});
  }

  int concat_total = 0;
  for (int src = 1; src < out; ++src) {
    if (!cell.edge(src, out)) continue;
    plan.concat_widths.push_back(ch[src]);
    concat_total += ch[src];
  }
  const int concat_arity = static_cast<int>(plan.concat_widths.size());
  if (concat_arity > 0) layers.push_back({LayerKind::Concat, concat_total, c_out, 0, concat_arity, cell_id, out});
  if (cell.edge(0, out)) {
    layers.push_back({LayerKind::Projection, c_in, c_out, 1, 1, cell_id, out});
    if (concat_arity > 0) layers.push_back({LayerKind::Sum, c_out, c_out, 0, 2, cell_id, out});
  }
  return plan;
}

}  // namespace detail

inline NetworkPlan build_plan(const ModelSpec& spec, const SkeletonConfig& cfg = {}) {
  if (!is_valid(spec)) throw ValidityError("build_plan requires a valid cell");
  cfg.validate();
  const ModelSpec cell = prune(spec);
  NetworkPlan plan;
  plan.layers.push_back({LayerKind::Stem, 3, cfg.stem_channels, 3});
  int channels = cfg.stem_channels;
  int cell_id = 0;
  for (int s = 0; s < cfg.num_stacks; ++s) {
    const int width = cfg.stem_channels << s;
    if (s > 0) plan.layers.push_back({LayerKind::Downsample, channels, channels, 2});
    for (int c = 0; c < cfg.cells_per_stack; ++c) {
      plan.cells.push_back(detail::append_cell(cell, channels, width, cell_id++, plan.layers));
      channels = width;
    }
  }
  plan.layers.push_back({LayerKind::GlobalAvgPool, channels, channels, 0});
  plan.layers.push_back({LayerKind::Dense, channels, cfg.num_classes, 0});
  return plan;
}

inline std::int64_t parameter_count(const NetworkPlan& plan) {
  std::int64_t total = 0;
  for (const auto& layer : plan.layers) total += layer_parameters(layer);
  return total;
}

inline std::int64_t parameter_count(const ModelSpec& spec, const SkeletonConfig& cfg = {}) {
  return parameter_count(build_plan(spec, cfg));
}

struct StructuralMetrics {
  int depth;  // edges on the longest input->output path
  int width;  // maximum directed cut over input/output bipartitions
};

inline StructuralMetrics structural_metrics(const ModelSpec& spec) {
  if (!is_valid(spec)) throw ValidityError("structural_metrics requires a valid cell");
  const ModelSpec cell = prune(spec);
  const int n = cell.num_vertices();
  std::vector<int> longest(n, -1);
  longest[0] = 0;
  for (int i = 0; i < n; ++i) {
    if (longest[i] < 0) continue;
    for (int j = i + 1; j < n; ++j)
      if (cell.edge(i, j)) longest[j] = std::max(longest[j], longest[i] + 1);
  }
  int width = 0;
  const int interior = n - 2;
  for (std::uint32_t assign = 0; assign < (1U << interior); ++assign) {
    // Bit v-1 set puts interior vertex v on the input side.
    const std::uint32_t source_side = 1U | (assign << 1);
    int cut = 0;
    for (int i = 0; i < n; ++i) {
      if (!((source_side >> i) & 1U)) continue;
      cut += std::popcount(static_cast<std::uint32_t>(cell.successors(i)) & ~source_side);
    }
    width = std::max(width, cut);
  }
  return {longest[n - 1], width};
}

inline nlohmann::json plan_to_json(const NetworkPlan& plan) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : plan.layers) {
    nlohmann::json j{{"kind", layer_kind_name(l.kind)},
                     {"c_in", l.c_in},
                     {"c_out", l.c_out},
                     {"kernel", l.kernel},
                     {"params", layer_parameters(l)}};
    if (l.arity != 1) j["arity"] = l.arity;
    if (l.cell >= 0) {
      j["cell"] = l.cell;
      j["vertex"] = l.vertex;
    }
    layers.push_back(std::move(j));
  }
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : plan.cells)
    cells.push_back({{"c_in", c.c_in}, {"c_out", c.c_out}, {"vertex_channels", c.vertex_channels},
                     {"concat_widths", c.concat_widths}});
  return {{"layers", std::move(layers)}, {"cells", std::move(cells)}, {"parameter_count", parameter_count(plan)}};
}

}  // namespace nasbench
