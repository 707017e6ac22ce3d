#pragma once

// Landscape and dataset analyses. Fitness is the trial-mean validation
// accuracy at 108 epochs unless stated otherwise. Every analysis has a CSV
// writer; whole-index scans take a `jobs` argument and reduce in a fixed
// order, so their output does not depend on the thread count.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nasbench/csv.hpp"
#include "nasbench/encoding.hpp"
#include "nasbench/oracle.hpp"
#include "nasbench/parallel.hpp"
#include "nasbench/searchbench.hpp"
#include "nasbench/stats.hpp"

namespace nasbench {

/// Trial-mean training seconds at `epochs`.
inline double mean_training_seconds(const Oracle& oracle, const Digest& digest, int epochs = kMaxEpochs) {
  std::array<double, kTrials> t{};
  for (int k = 1; k <= kTrials; ++k) t[k - 1] = oracle.record(digest, epochs, k).training_seconds;
  return stats::sum(t) / kTrials;
}

// ---------------------------------------------------------------------------
// Random-walk autocorrelation.
// ---------------------------------------------------------------------------

struct WalkStep {
  Digest digest;
  double fitness;
};

/// Walk of `steps` moves; each move goes to a uniformly chosen valid
/// encoding neighbour that the oracle contains and whose cell differs from
/// the cells visited in the last `memory` + 1 points (a flip inside
/// pruned-away padding is not a move). When every admitted neighbour is
/// that recent, any different cell is taken. A cell with no admitted
/// neighbour outside its own class (the bare in -> out cell) first makes
/// unrecorded moves within that class. Returns steps + 1 points.
inline std::vector<WalkStep> random_walk(const Oracle& oracle, std::size_t steps, Rng& rng, std::size_t memory = 0) {
  const SearchOracle view(oracle);
  auto [current, digest] = detail::sample_admitted(view, rng);
  std::vector<WalkStep> walk;
  walk.reserve(steps + 1);
  walk.push_back({digest, mean_validation_accuracy(oracle, digest)});
  auto recent = [&](const Digest& d) {
    const std::size_t n = std::min(walk.size(), memory + 1);
    for (std::size_t k = walk.size() - n; k < walk.size(); ++k)
      if (walk[k].digest == d) return true;
    return false;
  };
  int silent = 0;
  for (std::size_t s = 0; s < steps;) {
    auto candidates = neighbors(current);
    shuffle(std::span<ModelSpec>(candidates), rng);
    std::ptrdiff_t chosen = -1, fallback = -1, same = -1;
    Digest chosen_digest, fallback_digest;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto d = view.admit(candidates[c]);
      if (!d) continue;
      if (*d == digest) {
        if (same < 0) same = static_cast<std::ptrdiff_t>(c);
        continue;
      }
      if (!recent(*d)) {
        chosen = static_cast<std::ptrdiff_t>(c);
        chosen_digest = *d;
        break;
      }
      if (fallback < 0) {
        fallback = static_cast<std::ptrdiff_t>(c);
        fallback_digest = *d;
      }
    }
    if (chosen < 0) {
      chosen = fallback;
      chosen_digest = fallback_digest;
    }
    if (chosen < 0) {
      if (same < 0 || ++silent > 1000) throw PreconditionError("random walk is stuck: no admitted neighbouring cell");
      current = std::move(candidates[static_cast<std::size_t>(same)]);
      continue;
    }
    silent = 0;
    current = std::move(candidates[static_cast<std::size_t>(chosen)]);
    digest = chosen_digest;
    walk.push_back({digest, mean_validation_accuracy(oracle, digest)});
    ++s;
  }
  return walk;
}

/// Autocorrelation of the walk's fitness series at lags 0..max_lag. The walk
/// avoids cells seen within the last max_lag steps, so a revisit never
/// shows up as correlation.
inline std::vector<double> rwa(const Oracle& oracle, std::size_t walk_length, int max_lag, Rng& rng) {
  if (max_lag < 1 || walk_length <= static_cast<std::size_t>(max_lag) * 10)
    throw PreconditionError("walk length must be well above max_lag (at least 10x)");
  const auto walk = random_walk(oracle, walk_length, rng, static_cast<std::size_t>(max_lag));
  std::vector<double> series;
  series.reserve(walk.size());
  for (const auto& w : walk) series.push_back(w.fitness);
  return stats::autocorrelation(series, max_lag);
}

inline void write_rwa_csv(std::ostream& out, std::span<const double> autocorr) {
  out << "lag,sqrt_lag,autocorr\n";
  for (std::size_t k = 0; k < autocorr.size(); ++k)
    out << k << ',' << format_real(std::sqrt(static_cast<double>(k))) << ',' << format_real(autocorr[k]) << '\n';
}

// ---------------------------------------------------------------------------
// Fitness-distance correlation.
// ---------------------------------------------------------------------------

inline double fdc(std::span<const double> fitness, std::span<const double> distance) {
  if (fitness.size() != distance.size()) throw PreconditionError("fitness and distance lengths differ");
  return stats::pearson(fitness, distance);
}

struct FdcResult {
  double fdc;
  std::vector<double> fitness;
  std::vector<double> distance;
};

/// FDC of `sample` (index positions) against `peak`, distances measured
/// between the cells' stored encodings.
inline FdcResult fdc(const Oracle& oracle, std::span<const std::size_t> sample, const Digest& peak) {
  if (sample.empty()) throw PreconditionError("fdc needs a non-empty sample");
  const auto& cells = oracle.index().cells();
  const std::ptrdiff_t p = oracle.index().find(peak);
  if (p < 0) detail::unknown_architecture(peak);
  const ModelSpec& peak_spec = cells[static_cast<std::size_t>(p)].spec;
  FdcResult r;
  for (std::size_t i : sample) {
    r.fitness.push_back(mean_validation_accuracy(oracle, cells.at(i).digest));
    r.distance.push_back(encoding_distance(cells[i].spec, peak_spec));
  }
  r.fdc = fdc(r.fitness, r.distance);
  return r;
}

// ---------------------------------------------------------------------------
// Operation replacement.
// ---------------------------------------------------------------------------

struct OpReplacement {
  std::array<std::array<std::size_t, kNumOps>, kNumOps> count{};
  std::array<std::array<double, kNumOps>, kNumOps> accuracy_delta{};  // mean absolute validation delta
  std::array<std::array<double, kNumOps>, kNumOps> time_delta{};      // mean relative training-time delta
};

/// For every cell, interior vertex and different op: if the relabelled
/// cell is in the oracle, records the change in fitness and the relative
/// change in 108-epoch training time. Diagonal entries stay empty.
inline OpReplacement op_replacement_matrix(const Oracle& oracle, int jobs = 1) {
  const auto& cells = oracle.index().cells();
  constexpr std::size_t kChunk = 2048;
  struct Partial {
    std::array<std::array<std::size_t, kNumOps>, kNumOps> count{};
    std::array<std::array<std::vector<double>, kNumOps>, kNumOps> acc, time;
  };
  std::vector<Partial> partials((cells.size() + kChunk - 1) / kChunk);
  const auto fitness = parallel_map<double>(cells.size(), jobs,
                                            [&](std::size_t i) { return mean_validation_accuracy(oracle, cells[i].digest); });
  const auto seconds = parallel_map<double>(cells.size(), jobs,
                                            [&](std::size_t i) { return mean_training_seconds(oracle, cells[i].digest); });
  for_chunks(cells.size(), kChunk, jobs, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Partial& part = partials[c];
    for (std::size_t i = begin; i < end; ++i) {
      const ModelSpec& spec = cells[i].spec;
      for (int v = 1; v < spec.output(); ++v) {
        const int from = static_cast<int>(spec.op(v));
        for (Op to : kAllOps) {
          if (static_cast<int>(to) == from) continue;
          ModelSpec replaced = spec;
          replaced.set_op(v, to);
          const std::ptrdiff_t j = oracle.index().find(canonical_hash(replaced));
          if (j < 0) continue;
          const auto t = static_cast<int>(to);
          ++part.count[from][t];
          part.acc[from][t].push_back(fitness[static_cast<std::size_t>(j)] - fitness[i]);
          part.time[from][t].push_back((seconds[static_cast<std::size_t>(j)] - seconds[i]) / seconds[i]);
        }
      }
    }
  });
  OpReplacement out;
  for (int a = 0; a < kNumOps; ++a) {
    for (int b = 0; b < kNumOps; ++b) {
      std::vector<double> acc, time;
      for (const auto& p : partials) {
        out.count[a][b] += p.count[a][b];
        acc.insert(acc.end(), p.acc[a][b].begin(), p.acc[a][b].end());
        time.insert(time.end(), p.time[a][b].begin(), p.time[a][b].end());
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out.accuracy_delta[a][b] = acc.empty() ? nan : stats::mean(acc);
      out.time_delta[a][b] = time.empty() ? nan : stats::mean(time);
    }
  }
  return out;
}

inline void write_opmatrix_csv(std::ostream& out, const OpReplacement& m) {
  out << "from,to,count,mean_acc_delta,mean_rel_time_delta\n";
  for (int a = 0; a < kNumOps; ++a)
    for (int b = 0; b < kNumOps; ++b) {
      if (a == b) continue;
      out << op_name(kAllOps[a]) << ',' << op_name(kAllOps[b]) << ',' << m.count[a][b] << ','
          << format_real(m.accuracy_delta[a][b]) << ',' << format_real(m.time_delta[a][b]) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Accuracy ECDFs.
// ---------------------------------------------------------------------------

struct AccuracyEcdf {
  std::vector<std::pair<double, double>> train, validation, test, noise;
};

/// ECDFs of trial-mean train/validation/test accuracy at `epochs` and of the
/// inter-trial standard deviation of test accuracy.
inline AccuracyEcdf accuracy_ecdf(const Oracle& oracle, int epochs, int jobs = 1) {
  require_budget(epochs);
  const auto& cells = oracle.index().cells();
  const auto rows = parallel_map<std::array<double, 4>>(cells.size(), jobs, [&](std::size_t i) {
    std::array<double, kTrials> tr{}, va{}, te{};
    for (int k = 1; k <= kTrials; ++k) {
      const auto r = oracle.record(cells[i].digest, epochs, k);
      tr[k - 1] = r.train_accuracy;
      va[k - 1] = r.validation_accuracy;
      te[k - 1] = r.test_accuracy;
    }
    return std::array<double, 4>{stats::mean(tr), stats::mean(va), stats::mean(te), stats::stddev(te)};
  });
  std::array<std::vector<double>, 4> cols;
  for (auto& c : cols) c.reserve(rows.size());
  for (const auto& r : rows)
    for (int k = 0; k < 4; ++k) cols[k].push_back(r[k]);
  return {stats::ecdf(std::move(cols[0])), stats::ecdf(std::move(cols[1])), stats::ecdf(std::move(cols[2])),
          stats::ecdf(std::move(cols[3]))};
}

inline void write_accuracy_ecdf_csv(std::ostream& out, const AccuracyEcdf& e) {
  out << "metric,value,cum_fraction\n";
  const std::array<std::pair<const char*, const std::vector<std::pair<double, double>>*>, 4> series{
      {{"train", &e.train}, {"valid", &e.validation}, {"test", &e.test}, {"noise", &e.noise}}};
  for (const auto& [name, s] : series)
    for (const auto& [x, f] : *s) out << name << ',' << format_real(x) << ',' << format_real(f) << '\n';
}

// ---------------------------------------------------------------------------
// Volume near peak cells.
// ---------------------------------------------------------------------------

struct VolumePoint {
  int distance;
  double fraction;    // fraction of raw encodings within `distance` of a peak encoding
  double half_width;  // 95% normal-approximation half-width (0 for exhaustive)
};

namespace detail {

inline std::vector<EncodingPattern> peak_patterns(const SpaceIndex& index, std::span<const Digest> peaks) {
  if (peaks.empty()) throw PreconditionError("at least one peak is required");
  std::vector<EncodingPattern> patterns;
  for (const auto& d : peaks) {
    const std::ptrdiff_t p = index.find(d);
    if (p < 0) detail::unknown_architecture(d);
    const auto more = encoding_patterns(index.cells()[static_cast<std::size_t>(p)].spec);
    patterns.insert(patterns.end(), more.begin(), more.end());
  }
  std::sort(patterns.begin(), patterns.end());
  patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
  return patterns;
}

inline int min_pattern_distance(std::uint32_t edges, std::span<const Op> ops, std::span<const EncodingPattern> patterns) {
  int best = kEncodedPositions;
  for (const auto& p : patterns) best = std::min(best, pattern_distance(edges, ops, p));
  return best;
}

}  // namespace detail

/// Monte Carlo estimate over uniformly drawn raw encodings (valid or not) of
/// the fraction within distance d = 0..max_d of any encoding of any peak.
inline std::vector<VolumePoint> volume_within_distance(const SpaceIndex& index, std::span<const Digest> peaks,
                                                       int max_d, std::size_t sample_size, Rng& rng, int jobs = 1) {
  if (max_d < 0 || sample_size == 0) throw PreconditionError("need max_d >= 0 and a positive sample size");
  const auto patterns = detail::peak_patterns(index, peaks);
  // Draws are taken sequentially so the sample does not depend on jobs.
  std::vector<std::uint32_t> edges(sample_size);
  std::vector<std::array<Op, kMaxInterior>> ops(sample_size);
  for (std::size_t i = 0; i < sample_size; ++i) {
    const ModelSpec e = random_encoding(rng);
    edges[i] = edge_bits(e);
    std::copy(e.ops().begin(), e.ops().end(), ops[i].begin());
  }
  const auto dist = parallel_map<int>(sample_size, jobs, [&](std::size_t i) {
    return detail::min_pattern_distance(edges[i], ops[i], patterns);
  });
  std::vector<std::size_t> hist(kEncodedPositions + 1, 0);
  for (int d : dist) ++hist[static_cast<std::size_t>(d)];
  std::vector<VolumePoint> out;
  std::size_t within = 0;
  const double n = static_cast<double>(sample_size);
  for (int d = 0; d <= max_d; ++d) {
    if (d <= kEncodedPositions) within += hist[static_cast<std::size_t>(d)];
    const double f = static_cast<double>(within) / n;
    out.push_back({d, f, 1.96 * std::sqrt(f * (1.0 - f) / n)});
  }
  return out;
}

/// Exact counterpart of volume_within_distance over all 2^21 * 3^5 encodings.
inline std::vector<VolumePoint> volume_within_distance_exhaustive(const SpaceIndex& index,
                                                                  std::span<const Digest> peaks, int max_d,
                                                                  int jobs = 1) {
  const auto patterns = detail::peak_patterns(index, peaks);
  // Op-label part of the distance per pattern and label combination.
  constexpr int kLabelings = 243;
  std::vector<std::array<std::uint8_t, kLabelings>> op_dist(patterns.size());
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    for (int code = 0; code < kLabelings; ++code) {
      int c = code, d = 0;
      for (int v = 0; v < kMaxInterior; ++v, c /= kNumOps)
        if (!((patterns[p].free_slots >> v) & 1U) && static_cast<int>(patterns[p].ops[v]) != c % kNumOps) ++d;
      op_dist[p][static_cast<std::size_t>(code)] = static_cast<std::uint8_t>(d);
    }
  }
  constexpr std::size_t kEdgeMasks = std::size_t{1} << kEncodedEdges;
  constexpr std::size_t kChunk = std::size_t{1} << 14;
  std::vector<std::array<std::uint64_t, kEncodedPositions + 1>> partial(kEdgeMasks / kChunk);
  for_chunks(kEdgeMasks, kChunk, jobs, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& hist = partial[c];
    hist.fill(0);
    std::vector<std::uint8_t> ed(patterns.size());
    std::array<std::uint8_t, kLabelings> best{};
    for (std::size_t e = begin; e < end; ++e) {
      for (std::size_t p = 0; p < patterns.size(); ++p)
        ed[p] = static_cast<std::uint8_t>(std::popcount(static_cast<std::uint32_t>(e) ^ patterns[p].edges));
      best.fill(kEncodedPositions);
      for (std::size_t p = 0; p < patterns.size(); ++p)
        for (int code = 0; code < kLabelings; ++code)
          best[code] = std::min<std::uint8_t>(best[code], static_cast<std::uint8_t>(ed[p] + op_dist[p][code]));
      for (auto b : best) ++hist[b];
    }
  });
  std::array<std::uint64_t, kEncodedPositions + 1> hist{};
  for (const auto& h : partial)
    for (std::size_t d = 0; d < h.size(); ++d) hist[d] += h[d];
  std::vector<VolumePoint> out;
  std::uint64_t within = 0;
  for (int d = 0; d <= max_d; ++d) {
    if (d <= kEncodedPositions) within += hist[static_cast<std::size_t>(d)];
    out.push_back({d, static_cast<double>(within) / static_cast<double>(kRawEncodingCount), 0.0});
  }
  return out;
}

inline void write_volume_csv(std::ostream& out, std::span<const VolumePoint> points) {
  out << "distance,fraction,ci_half_width\n";
  for (const auto& p : points)
    out << p.distance << ',' << format_real(p.fraction) << ',' << format_real(p.half_width) << '\n';
}

/// The best cell plus every cell whose mean test accuracy is within two
/// standard errors (over its three trials) of the best cell's.
inline std::vector<Digest> top_cells(const Oracle& oracle, int jobs = 1) {
  const auto& cells = oracle.index().cells();
  const auto acc = parallel_map<double>(cells.size(), jobs,
                                        [&](std::size_t i) { return mean_test_accuracy(oracle, cells[i].digest); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < acc.size(); ++i)
    if (acc[i] > acc[best]) best = i;
  std::array<double, kTrials> trials{};
  for (int k = 1; k <= kTrials; ++k) trials[k - 1] = oracle.record(cells[best].digest, kMaxEpochs, k).test_accuracy;
  const double sem = stats::stddev(trials) / std::sqrt(static_cast<double>(kTrials));
  std::vector<Digest> out;
  for (std::size_t i = 0; i < acc.size(); ++i)
    if (acc[i] >= acc[best] - 2.0 * sem) out.push_back(cells[i].digest);
  return out;
}

// ---------------------------------------------------------------------------
// Rank correlation between budgets.
// ---------------------------------------------------------------------------

struct RankCorrelation {
  double rho;
  std::size_t cells;
};

/// Spearman correlation of trial-mean validation accuracy at budgets a and
/// b over the top `top_percent` of cells ranked by accuracy at b.
inline RankCorrelation budget_rank_correlation(const Oracle& oracle, int budget_a, int budget_b, double top_percent,
                                               int jobs = 1) {
  require_budget(budget_a);
  require_budget(budget_b);
  if (!(top_percent > 0.0 && top_percent <= 100.0)) throw PreconditionError("top percentile must lie in (0, 100]");
  const auto& cells = oracle.index().cells();
  const auto acc_b = parallel_map<double>(
      cells.size(), jobs, [&](std::size_t i) { return mean_validation_accuracy(oracle, cells[i].digest, budget_b); });
  const auto keep = static_cast<std::size_t>(std::ceil(top_percent / 100.0 * static_cast<double>(cells.size())));
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return acc_b[x] > acc_b[y]; });
  order.resize(keep);
  std::vector<double> xa, xb;
  for (std::size_t i : order) {
    xa.push_back(budget_a == budget_b ? acc_b[i] : mean_validation_accuracy(oracle, cells[i].digest, budget_a));
    xb.push_back(acc_b[i]);
  }
  return {stats::spearman(xa, xb), keep};
}

// ---------------------------------------------------------------------------
// Depth / width aggregates.
// ---------------------------------------------------------------------------

struct GroupSummary {
  std::size_t cells = 0;
  double mean_validation = 0.0;
  double mean_seconds = 0.0;
};

struct DepthWidthProfile {
  std::map<int, GroupSummary> by_depth;
  std::map<int, GroupSummary> by_width;
};

inline DepthWidthProfile depth_width_profile(const Oracle& oracle, int jobs = 1) {
  const auto& cells = oracle.index().cells();
  struct Row {
    int depth, width;
    double acc, secs;
  };
  const auto rows = parallel_map<Row>(cells.size(), jobs, [&](std::size_t i) {
    const auto m = structural_metrics(cells[i].spec);
    return Row{m.depth, m.width, mean_validation_accuracy(oracle, cells[i].digest),
               mean_training_seconds(oracle, cells[i].digest)};
  });
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> depth, width;
  for (const auto& r : rows) {
    depth[r.depth].first.push_back(r.acc);
    depth[r.depth].second.push_back(r.secs);
    width[r.width].first.push_back(r.acc);
    width[r.width].second.push_back(r.secs);
  }
  DepthWidthProfile out;
  for (const auto& [k, v] : depth) out.by_depth[k] = {v.first.size(), stats::mean(v.first), stats::mean(v.second)};
  for (const auto& [k, v] : width) out.by_width[k] = {v.first.size(), stats::mean(v.first), stats::mean(v.second)};
  return out;
}

inline void write_depthwidth_csv(std::ostream& out, const DepthWidthProfile& p) {
  out << "group,key,cells,mean_valid_acc,mean_time_s\n";
  for (const auto& [k, g] : p.by_depth)
    out << "depth," << k << ',' << g.cells << ',' << format_real(g.mean_validation) << ','
        << format_real(g.mean_seconds) << '\n';
  for (const auto& [k, g] : p.by_width)
    out << "width," << k << ',' << g.cells << ',' << format_real(g.mean_validation) << ','
        << format_real(g.mean_seconds) << '\n';
}

}  // namespace nasbench
