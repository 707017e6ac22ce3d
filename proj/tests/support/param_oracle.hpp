#pragma once

// Reference parameter count: materializes every weight tensor of the
// stacked network as an explicit shape and sums their element counts.

#include <cstdint>
#include <vector>

namespace oracle {

struct Weight {
  std::vector<std::int64_t> shape;
  std::int64_t elements() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
};

/// ops: 0 = conv3x3, 1 = conv1x1, 2 = maxpool3x3. The matrix must already
/// be pruned.
inline std::vector<Weight> materialize_cell(const std::vector<std::vector<int>>& m, const std::vector<int>& ops,
                                            std::int64_t c_in, std::int64_t c_out) {
  const int n = static_cast<int>(m.size());
  const int out = n - 1;
  std::vector<std::int64_t> ch(n, 0);
  ch[0] = c_in;
  ch[out] = c_out;
  std::vector<int> feeders;
  for (int v = 1; v < out; ++v)
    if (m[v][out]) feeders.push_back(v);
  for (std::size_t k = 0; k < feeders.size(); ++k) {
    const std::int64_t base = c_out / static_cast<std::int64_t>(feeders.size());
    const std::int64_t rem = c_out % static_cast<std::int64_t>(feeders.size());
    ch[feeders[k]] = base + (static_cast<std::int64_t>(k) < rem ? 1 : 0);
  }
  for (int v = out - 1; v >= 1; --v) {
    if (m[v][out]) continue;
    for (int w = v + 1; w < out; ++w)
      if (m[v][w] && ch[w] > ch[v]) ch[v] = ch[w];
  }
  std::vector<Weight> ws;
  auto conv = [&](std::int64_t k, std::int64_t ci, std::int64_t co) {
    ws.push_back({{k, k, ci, co}});
    ws.push_back({{co}});  // batch-norm scale
    ws.push_back({{co}});  // batch-norm shift
  };
  for (int v = 1; v < out; ++v) {
    if (m[0][v]) conv(1, c_in, ch[v]);
    if (ops[v - 1] == 0) conv(3, ch[v], ch[v]);
    if (ops[v - 1] == 1) conv(1, ch[v], ch[v]);
  }
  if (m[0][out]) conv(1, c_in, c_out);
  return ws;
}

inline std::int64_t network_parameters(const std::vector<std::vector<int>>& m, const std::vector<int>& ops,
                                       std::int64_t stem = 128, int stacks = 3, int cells = 3, std::int64_t classes = 10) {
  std::vector<Weight> all;
  all.push_back({{3, 3, 3, stem}});
  all.push_back({{stem}});
  all.push_back({{stem}});
  std::int64_t c = stem;
  for (int s = 0; s < stacks; ++s) {
    const std::int64_t width = stem << s;
    for (int k = 0; k < cells; ++k) {
      auto w = materialize_cell(m, ops, c, width);
      all.insert(all.end(), w.begin(), w.end());
      c = width;
    }
  }
  all.push_back({{c, classes}});
  all.push_back({{classes}});
  std::int64_t total = 0;
  for (const auto& w : all) total += w.elements();
  return total;
}

}  // namespace oracle
