#pragma once

// Exhaustive enumeration of the canonical cell space and the space-index file.

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nasbench/canonical.hpp"
#include "nasbench/cell_spec.hpp"
#include "nasbench/errors.hpp"

namespace nasbench {

struct SpaceParams {
  int max_vertices = kMaxVertices;
  int max_edges = kMaxEdges;

  friend bool operator==(const SpaceParams&, const SpaceParams&) = default;
};

struct IndexedCell {
  Digest digest;
  ModelSpec spec;  // pruned, lexicographically smallest member of its class

  friend bool operator==(const IndexedCell&, const IndexedCell&) = default;
};

class SpaceIndex {
 public:
  SpaceIndex() = default;
  SpaceIndex(SpaceParams params, std::vector<IndexedCell> cells) : params_(params), cells_(std::move(cells)) {}

  const SpaceParams& params() const { return params_; }
  const std::vector<IndexedCell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

  /// Position of `digest` in the sorted cell list, or -1.
  std::ptrdiff_t find(const Digest& digest) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), digest,
                               [](const IndexedCell& c, const Digest& d) { return c.digest < d; });
    if (it == cells_.end() || it->digest != digest) return -1;
    return it - cells_.begin();
  }

  bool contains(const Digest& digest) const { return find(digest) >= 0; }

  friend bool operator==(const SpaceIndex&, const SpaceIndex&) = default;

 private:
  SpaceParams params_;
  std::vector<IndexedCell> cells_;
};

namespace detail {

using ShardMap = std::unordered_map<Digest, ModelSpec>;

inline void keep_smaller(ShardMap& map, const Digest& digest, const ModelSpec& spec) {
  auto [it, inserted] = map.try_emplace(digest, spec);
  if (!inserted && spec < it->second) it->second = spec;
}

/// Fully connected matrices (every vertex on an input->output path) with
/// `v` vertices and at most `max_edges` edges, as 7-row successor masks.
inline std::vector<ModelSpec> pruned_topologies(int v, int max_edges) {
  const int slots = v * (v - 1) / 2;
  std::vector<std::pair<int, int>> slot_pairs;
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j) slot_pairs.emplace_back(i, j);
  std::vector<ModelSpec> out;
  for (std::uint32_t bits = 0; bits < (1U << slots); ++bits) {
    if (std::popcount(bits) > max_edges) continue;
    ModelSpec spec = ModelSpec::empty(v);
    for (int k = 0; k < slots; ++k)
      if ((bits >> k) & 1U) spec.set_edge(slot_pairs[k].first, slot_pairs[k].second, true);
    if (has_input_output_path(spec) && is_pruned(spec)) out.push_back(spec);
  }
  return out;
}

/// Hashes every labeling of topologies[first..last) into `map`.
inline void hash_labelings(const std::vector<ModelSpec>& topologies, std::size_t first, std::size_t last,
                           ShardMap& map) {
  for (std::size_t t = first; t < last; ++t) {
    ModelSpec spec = topologies[t];
    const int k = spec.num_interior();
    int labelings = 1;
    for (int i = 0; i < k; ++i) labelings *= kNumOps;
    for (int code = 0; code < labelings; ++code) {
      int c = code;
      for (int i = 1; i <= k; ++i) {
        spec.set_op(i, static_cast<Op>(c % kNumOps));
        c /= kNumOps;
      }
      keep_smaller(map, hash_pruned(spec), spec);
    }
  }
}

}  // namespace detail

/// Enumerates every computationally distinct cell with at most
/// `max_vertices` vertices and `max_edges` edges.
///
/// Every valid cell prunes to a fully connected cell with no more vertices
/// or edges, and fully connected cells are their own pruned form, so the
/// equivalence classes are exactly the classes of fully connected cells.
/// Only those are hashed. Work is sharded over topologies; each class keeps
/// its lexicographically smallest member, so the result does not depend on
/// `jobs` or shard order.
inline SpaceIndex enumerate_space(int max_vertices, int max_edges, int jobs = 1) {
  if (max_vertices < 2 || max_vertices > kMaxVertices)
    throw PreconditionError("max_vertices must be in [2, 7]");
  if (max_edges < 1) throw PreconditionError("max_edges must be >= 1");
  jobs = std::max(1, jobs);

  std::vector<ModelSpec> topologies;
  for (int v = 2; v <= max_vertices; ++v) {
    auto t = detail::pruned_topologies(v, max_edges);
    topologies.insert(topologies.end(), t.begin(), t.end());
  }

  // Many small shards so larger-V topologies spread over workers.
  const std::size_t shard_count = std::min<std::size_t>(topologies.size(), 64 * static_cast<std::size_t>(jobs));
  std::vector<detail::ShardMap> shards(std::max<std::size_t>(shard_count, 1));
  auto run_shard = [&](std::size_t s) {
    const std::size_t first = topologies.size() * s / shards.size();
    const std::size_t last = topologies.size() * (s + 1) / shards.size();
    detail::hash_labelings(topologies, first, last, shards[s]);
  };
  if (jobs == 1) {
    for (std::size_t s = 0; s < shards.size(); ++s) run_shard(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t s; (s = next.fetch_add(1)) < shards.size();) run_shard(s);
      });
    }
    for (auto& t : workers) t.join();
  }

  detail::ShardMap merged = std::move(shards[0]);
  for (std::size_t s = 1; s < shards.size(); ++s)
    for (const auto& [digest, spec] : shards[s]) detail::keep_smaller(merged, digest, spec);

  std::vector<IndexedCell> cells;
  cells.reserve(merged.size());
  for (const auto& [digest, spec] : merged) cells.push_back({digest, spec});
  std::sort(cells.begin(), cells.end(), [](const IndexedCell& a, const IndexedCell& b) { return a.digest < b.digest; });
  return SpaceIndex({max_vertices, max_edges}, std::move(cells));
}

// ---------------------------------------------------------------------------
// Index file.
//
//   NASBENCH-SPACE v1 max_vertices=<k> max_edges=<m> ops=CONV3X3,CONV1X1,MAXPOOL3X3 count=<n>
//   <digest-hex> <V> <E> <matrix row-major bits> <ops comma-separated, '-' when V = 2>
// ---------------------------------------------------------------------------

inline constexpr std::string_view kIndexMagic = "NASBENCH-SPACE";
inline constexpr std::string_view kIndexVersion = "v1";
inline constexpr std::string_view kOpsField = "ops=CONV3X3,CONV1X1,MAXPOOL3X3";

inline void write_index(const SpaceIndex& index, std::ostream& out) {
  out << kIndexMagic << ' ' << kIndexVersion << " max_vertices=" << index.params().max_vertices
      << " max_edges=" << index.params().max_edges << ' ' << kOpsField << " count=" << index.size() << '\n';
  for (const auto& cell : index.cells()) {
    const std::string ops = cell.spec.ops_string();
    out << cell.digest.hex() << ' ' << cell.spec.num_vertices() << ' ' << cell.spec.num_edges() << ' '
        << cell.spec.matrix_bits() << ' ' << (ops.empty() ? "-" : ops) << '\n';
  }
}

inline void write_index(const SpaceIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_index(index, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace detail {

inline int parse_header_int(const std::string& token, std::string_view key) {
  if (!token.starts_with(key) || token.size() <= key.size() || token[key.size()] != '=')
    throw CorruptionError("index header: expected '" + std::string(key) + "=<n>', got '" + token + "'");
  const std::string value = token.substr(key.size() + 1);
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || n < 0) throw CorruptionError("index header: bad value in '" + token + "'");
  return static_cast<int>(n);
}

}  // namespace detail

/// Reads and re-validates an index: header fields, record shape, cell
/// validity and pruning, record count and strict digest ordering.
/// With `verify_digests`, every digest is also recomputed.
inline SpaceIndex read_index(std::istream& in, bool verify_digests = false) {
  std::string header;
  if (!std::getline(in, header)) throw CorruptionError("index file is empty");
  std::istringstream hs(header);
  std::string magic, version, tv, te, tops, tcount, extra;
  hs >> magic >> version >> tv >> te >> tops >> tcount;
  if (magic != kIndexMagic || version != kIndexVersion) throw CorruptionError("not a NASBENCH-SPACE v1 file");
  if (tops != kOpsField) throw CorruptionError("index header: unsupported operation set '" + tops + "'");
  if (hs >> extra) throw CorruptionError("index header: trailing field '" + extra + "'");
  const SpaceParams params{detail::parse_header_int(tv, "max_vertices"), detail::parse_header_int(te, "max_edges")};
  const int count = detail::parse_header_int(tcount, "count");
  if (params.max_vertices < 2 || params.max_vertices > kMaxVertices || params.max_edges < 1)
    throw CorruptionError("index header: parameters out of range");

  std::vector<IndexedCell> cells;
  cells.reserve(count);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto fail = [&](const std::string& what) {
      throw CorruptionError("index line " + std::to_string(line_no) + ": " + what);
    };
    std::istringstream ls(line);
    std::string hex, bits, ops;
    int v = 0, e = 0;
    if (!(ls >> hex >> v >> e >> bits >> ops) || (ls >> extra)) fail("malformed record");
    const auto digest = Digest::from_hex(hex);
    if (!digest) fail("bad digest");
    if (v < 2 || v > params.max_vertices) fail("vertex count exceeds header max_vertices");
    ModelSpec spec;
    try {
      spec = parse_spec("matrix=" + bits + ";ops=" + (ops == "-" ? std::string() : ops));
    } catch (const StructuralError& err) {
      fail(err.what());
    }
    if (spec.num_vertices() != v) fail("vertex count does not match matrix");
    if (spec.num_edges() != e) fail("edge count does not match matrix");
    if (e > params.max_edges) fail("edge count exceeds header max_edges");
    if (!is_valid(spec) || !is_pruned(spec)) fail("cell is not a valid pruned cell");
    if (!cells.empty() && !(cells.back().digest < *digest)) fail("digests out of order or duplicated");
    if (verify_digests && detail::hash_pruned(spec) != *digest) fail("digest does not match cell");
    cells.push_back({*digest, spec});
  }
  if (static_cast<int>(cells.size()) != count)
    throw CorruptionError("index holds " + std::to_string(cells.size()) + " records, header says " +
                          std::to_string(count));
  return SpaceIndex(params, std::move(cells));
}

inline SpaceIndex read_index(const std::string& path, bool verify_digests = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index '" + path + "'");
  return read_index(in, verify_digests);
}

}  // namespace nasbench
