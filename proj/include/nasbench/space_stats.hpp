#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>

#include "json.hpp"
#include "nasbench/enumerator.hpp"
#include "nasbench/netmodel.hpp"

namespace nasbench {

/// Structural histograms of a space index.
struct SpaceStats {
  std::size_t total = 0;
  std::map<int, std::size_t> by_vertices;
  std::map<int, std::size_t> by_edges;
  std::map<std::array<int, kNumOps>, std::size_t> by_op_counts;  // (#CONV3X3, #CONV1X1, #MAXPOOL3X3)
  std::map<int, std::size_t> by_depth;
  std::map<int, std::size_t> by_width;
};

inline std::array<int, kNumOps> op_counts(const ModelSpec& spec) {
  std::array<int, kNumOps> counts{};
  for (Op op : spec.ops()) ++counts[static_cast<int>(op)];
  return counts;
}

inline SpaceStats space_stats(const SpaceIndex& index) {
  SpaceStats s;
  s.total = index.size();
  for (const auto& cell : index.cells()) {
    ++s.by_vertices[cell.spec.num_vertices()];
    ++s.by_edges[cell.spec.num_edges()];
    ++s.by_op_counts[op_counts(cell.spec)];
    const auto m = structural_metrics(cell.spec);
    ++s.by_depth[m.depth];
    ++s.by_width[m.width];
  }
  return s;
}

inline nlohmann::json stats_to_json(const SpaceIndex& index, const SpaceStats& s) {
  auto hist = [](const std::map<int, std::size_t>& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& [k, v] : s.by_op_counts)
    ops.push_back({{"conv3x3", k[0]}, {"conv1x1", k[1]}, {"maxpool3x3", k[2]}, {"count", v}});
  return {{"max_vertices", index.params().max_vertices},
          {"max_edges", index.params().max_edges},
          {"total", s.total},
          {"vertices", hist(s.by_vertices)},
          {"edges", hist(s.by_edges)},
          {"op_counts", std::move(ops)},
          {"depth", hist(s.by_depth)},
          {"width", hist(s.by_width)}};
}

}  // namespace nasbench
