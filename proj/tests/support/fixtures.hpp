#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "nasbench/nasbench.hpp"

namespace fixtures {

using namespace nasbench;

/// Space indices shared by the tests of one binary, built on first use.
inline std::shared_ptr<const SpaceIndex> space(int max_vertices, int max_edges = kMaxEdges) {
  static std::map<std::pair<int, int>, std::shared_ptr<const SpaceIndex>> cache;
  auto& slot = cache[{max_vertices, max_edges}];
  if (!slot) slot = std::make_shared<const SpaceIndex>(enumerate_space(max_vertices, max_edges));
  return slot;
}

inline ModelSpec spec(const std::vector<std::vector<int>>& m, std::vector<Op> ops) {
  return ModelSpec::from_matrix(m, ops);
}

/// in -> conv3x3 -> conv3x3 -> out, plus in -> out.
inline ModelSpec resnet_like() {
  return spec({{0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}}, {Op::Conv3x3, Op::Conv3x3});
}

/// Three concatenated branches: maxpool -> conv1x1, conv3x3, conv3x3 -> conv3x3.
inline ModelSpec inception_like() {
  return spec({{0, 1, 0, 1, 1, 0, 0},
               {0, 0, 1, 0, 0, 0, 0},
               {0, 0, 0, 0, 0, 0, 1},
               {0, 0, 0, 0, 0, 0, 1},
               {0, 0, 0, 0, 0, 1, 0},
               {0, 0, 0, 0, 0, 0, 1},
               {0, 0, 0, 0, 0, 0, 0}},
              {Op::MaxPool3x3, Op::Conv1x1, Op::Conv3x3, Op::Conv3x3, Op::Conv3x3});
}

/// in -> conv3x3 -> out.
inline ModelSpec chain() { return spec({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, {Op::Conv3x3}); }

inline std::vector<std::vector<int>> matrix_of(const ModelSpec& s) { return s.matrix(); }

inline std::vector<int> ops_of(const ModelSpec& s) {
  std::vector<int> out;
  for (Op op : s.ops()) out.push_back(static_cast<int>(op));
  return out;
}

/// Oracle whose validation and test accuracy is fn(index position, epochs);
/// training time is 100 s per epoch, identical across trials.
class FunctionOracle final : public Oracle {
 public:
  using Fn = std::function<double(std::size_t, int)>;
  FunctionOracle(std::shared_ptr<const SpaceIndex> index, Fn fn) : index_(std::move(index)), fn_(std::move(fn)) {}
  std::string_view backend() const override { return "function"; }
  const SpaceIndex& index() const override { return *index_; }
  EvaluationRecord record(const Digest& d, int e, int t) const override {
    require_budget(e);
    const auto i = index_->find(d);
    if (i < 0) throw UnknownArchitectureError(d.hex());
    const double a = fn_(static_cast<std::size_t>(i), e);
    return {d, e, t, 1.0, a, a, 100.0 * e, 1};
  }

 private:
  std::shared_ptr<const SpaceIndex> index_;
  Fn fn_;
};

}  // namespace fixtures
