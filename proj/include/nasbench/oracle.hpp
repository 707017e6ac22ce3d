#pragma once

// Architecture -> metrics lookups.
//
// An Oracle maps (digest, epoch budget, trial) to an EvaluationRecord. Two
// backends exist: a tabular store loaded from a JSON-lines metrics file and
// a deterministic synthetic surrogate. Both are immutable after
// construction and safe to share between threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nasbench/canonical.hpp"
#include "nasbench/enumerator.hpp"
#include "nasbench/errors.hpp"
#include "nasbench/netmodel.hpp"
#include "nasbench/rng.hpp"
#include "nasbench/space_stats.hpp"
#include "nasbench/stats.hpp"

namespace nasbench {

inline constexpr std::array<int, 4> kEpochBudgets{4, 12, 36, 108};
inline constexpr int kMaxEpochs = 108;
inline constexpr int kTrials = 3;

/// Position of `epochs` in kEpochBudgets, or -1.
inline constexpr int budget_slot(int epochs) {
  for (int i = 0; i < static_cast<int>(kEpochBudgets.size()); ++i)
    if (kEpochBudgets[i] == epochs) return i;
  return -1;
}

inline void require_budget(int epochs) {
  if (budget_slot(epochs) < 0)
    throw PreconditionError("epoch budget must be one of 4, 12, 36, 108 (got " + std::to_string(epochs) + ")");
}

struct EvaluationRecord {
  Digest digest;
  int epochs = kMaxEpochs;
  int trial = 1;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
  double test_accuracy = 0.0;
  double training_seconds = 0.0;
  std::int64_t parameter_count = 0;

  friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::string_view backend() const = 0;
  virtual const SpaceIndex& index() const = 0;

  /// Record for (digest, epochs, trial). Throws UnknownArchitectureError for
  /// digests outside the oracle and PreconditionError for bad budget/trial.
  virtual EvaluationRecord record(const Digest& digest, int epochs, int trial) const = 0;

  bool contains(const Digest& digest) const { return index().contains(digest); }
};

namespace detail {

inline void require_trial(int trial) {
  if (trial < 1 || trial > kTrials) throw PreconditionError("trial must be 1, 2 or 3");
}

[[noreturn]] inline void unknown_architecture(const Digest& digest) {
  throw UnknownArchitectureError("architecture " + digest.hex() + " is not in the oracle");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tabular backend.
//
// Metrics file: JSON lines, one object per record:
//   {"digest": hex, "epochs": 4|12|36|108, "trial": 1|2|3, "train_acc": f,
//    "valid_acc": f, "test_acc": f, "time_s": f, "params": int}
// ---------------------------------------------------------------------------

inline nlohmann::json record_to_json(const EvaluationRecord& r) {
  return {{"digest", r.digest.hex()},          {"epochs", r.epochs},
          {"trial", r.trial},                  {"train_acc", r.train_accuracy},
          {"valid_acc", r.validation_accuracy}, {"test_acc", r.test_accuracy},
          {"time_s", r.training_seconds},      {"params", r.parameter_count}};
}

/// Parses and range-checks one metrics object. `where` prefixes error messages.
inline EvaluationRecord record_from_json(const nlohmann::json& j, const std::string& where) {
  auto fail = [&](const std::string& what) -> void { throw SchemaError(where + ": " + what); };
  if (!j.is_object()) fail("record must be a JSON object");
  static constexpr std::array<std::string_view, 8> kKeys{"digest",    "epochs",   "trial",  "train_acc",
                                                         "valid_acc", "test_acc", "time_s", "params"};
  for (const auto& [key, value] : j.items())
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail("unexpected field '" + key + "'");
  for (auto key : kKeys)
    if (!j.contains(key)) fail("missing field '" + std::string(key) + "'");

  EvaluationRecord r;
  if (!j["digest"].is_string()) fail("digest must be a string");
  const auto digest = Digest::from_hex(j["digest"].get<std::string>());
  if (!digest) fail("digest must be 32 lowercase hex characters");
  r.digest = *digest;
  if (!j["epochs"].is_number_integer() || budget_slot(j["epochs"].get<int>()) < 0)
    fail("epochs must be one of 4, 12, 36, 108");
  r.epochs = j["epochs"].get<int>();
  if (!j["trial"].is_number_integer() || j["trial"].get<int>() < 1 || j["trial"].get<int>() > kTrials)
    fail("trial must be 1, 2 or 3");
  r.trial = j["trial"].get<int>();
  auto accuracy = [&](std::string_view key) {
    const auto& v = j[std::string(key)];
    if (!v.is_number()) fail(std::string(key) + " must be a number");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) fail(std::string(key) + " must lie in [0, 1]");
    return x;
  };
  r.train_accuracy = accuracy("train_acc");
  r.validation_accuracy = accuracy("valid_acc");
  r.test_accuracy = accuracy("test_acc");
  if (!j["time_s"].is_number() || !(j["time_s"].get<double>() > 0.0)) fail("time_s must be a positive number");
  r.training_seconds = j["time_s"].get<double>();
  if (!j["params"].is_number_integer() || j["params"].get<std::int64_t>() < 0)
    fail("params must be a non-negative integer");
  r.parameter_count = j["params"].get<std::int64_t>();
  return r;
}

class TabularOracle final : public Oracle {
 public:
  static constexpr std::size_t kSlots = kEpochBudgets.size() * kTrials;

  /// Builds from in-memory records; same checks as load_tabular.
  TabularOracle(std::shared_ptr<const SpaceIndex> index, const std::vector<EvaluationRecord>& records)
      : index_(std::move(index)), records_(index_->size() * kSlots), present_(records_.size(), false) {
    std::vector<std::string> unknown;
    for (const auto& r : records) {
      const std::ptrdiff_t pos = index_->find(r.digest);
      if (pos < 0) {
        unknown.push_back(r.digest.hex());
        continue;
      }
      const std::size_t slot = static_cast<std::size_t>(pos) * kSlots + offset(r.epochs, r.trial);
      if (present_[slot])
        throw SchemaError("duplicate record for " + r.digest.hex() + " epochs=" + std::to_string(r.epochs) +
                          " trial=" + std::to_string(r.trial));
      records_[slot] = r;
      present_[slot] = true;
    }
    std::vector<std::string> gaps;
    std::size_t gap_count = 0;
    for (std::size_t c = 0; c < index_->size(); ++c) {
      for (std::size_t s = 0; s < kSlots; ++s) {
        if (present_[c * kSlots + s]) continue;
        ++gap_count;
        if (gaps.size() < 20)
          gaps.push_back(index_->cells()[c].digest.hex() + " epochs=" + std::to_string(kEpochBudgets[s / kTrials]) +
                         " trial=" + std::to_string(s % kTrials + 1));
      }
    }
    if (!unknown.empty() || gap_count > 0) {
      std::ostringstream msg;
      msg << "metrics incomplete:";
      if (!unknown.empty()) {
        msg << ' ' << unknown.size() << " record(s) with unknown digest (first: " << unknown.front() << ");";
      }
      if (gap_count > 0) {
        msg << ' ' << gap_count << " missing (digest, epochs, trial) combination(s):";
        for (const auto& g : gaps) msg << "\n  " << g;
        if (gap_count > gaps.size()) msg << "\n  ...";
      }
      throw CompletenessError(msg.str());
    }
  }

  std::string_view backend() const override { return "tabular"; }
  const SpaceIndex& index() const override { return *index_; }

  EvaluationRecord record(const Digest& digest, int epochs, int trial) const override {
    require_budget(epochs);
    detail::require_trial(trial);
    const std::ptrdiff_t pos = index_->find(digest);
    if (pos < 0) detail::unknown_architecture(digest);
    return records_[static_cast<std::size_t>(pos) * kSlots + offset(epochs, trial)];
  }

 private:
  static std::size_t offset(int epochs, int trial) {
    return static_cast<std::size_t>(budget_slot(epochs)) * kTrials + static_cast<std::size_t>(trial - 1);
  }

  std::shared_ptr<const SpaceIndex> index_;
  std::vector<EvaluationRecord> records_;
  std::vector<bool> present_;
};

/// Reads every record of a JSON-lines metrics stream (schema checks only).
inline std::vector<EvaluationRecord> read_metrics(std::istream& in, const std::string& name = "metrics") {
  std::vector<EvaluationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(where + ": invalid JSON (" + e.what() + ")");
    }
    records.push_back(record_from_json(j, where));
  }
  return records;
}

inline std::unique_ptr<TabularOracle> load_tabular(std::shared_ptr<const SpaceIndex> index, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open metrics file '" + path + "'");
  return std::make_unique<TabularOracle>(std::move(index), read_metrics(in, path));
}

// ---------------------------------------------------------------------------
// Synthetic surrogate.
//
// Every cell gets a latent quality
//   q = locality * z(structure) + ruggedness * N_cell
// where z is a fixed smooth function of op counts, depth, width, edge count
// and the input->output skip edge, standardized with pinned constants, and
// N_* are standard normals keyed by (seed, digest, purpose[, epochs, trial]).
// Per budget E the mean validation accuracy is
//   floor + (ceiling_E - floor) * sigmoid(slope * (q + spread_E * N_budget) + offset_E)
// and each trial adds noise with a standard deviation that shrinks with E.
// Test accuracy is the trial's validation accuracy plus a small keyed
// offset. Training time is time_scale * params * E * exp(jitter).
// ---------------------------------------------------------------------------

struct SurrogateParams {
  double locality = 1.0;
  double ruggedness = 0.3;
  double floor = 0.10;
  double slope = 0.35;
  std::array<double, 4> ceiling{0.90, 0.93, 0.95, 0.96};
  std::array<double, 4> offset{1.4, 2.0, 2.5, 2.8};
  std::array<double, 4> spread{0.9, 0.6, 0.4, 0.0};
  std::array<double, 4> trial_noise{0.012, 0.006, 0.0045, 0.003};
  std::array<double, 4> train_fit{0.35, 0.7, 0.9, 0.985};
  double test_offset_sd = 0.0015;
  double test_bias = -0.004;
  double time_scale = 3.0e-6;  // seconds per parameter per epoch
  double time_jitter = 0.06;   // log-normal sd, clipped at 3 sd
};

/// Smooth structural score of a pruned cell before standardization.
inline double structural_score(const ModelSpec& cell, std::int64_t params) {
  const auto counts = op_counts(cell);
  const auto m = structural_metrics(cell);
  const int interior = cell.num_interior();
  const double conv3 = counts[0], conv1 = counts[1], pool = counts[2];
  const double depth_penalty = (m.depth - 3.0) * (m.depth - 3.0);
  const double width = std::min(m.width, 5);
  const double skip = cell.edge(0, cell.output()) ? 1.0 : 0.0;
  double s = 0.55 * conv3 + 0.30 * conv1 - 0.10 * pool;
  s -= 0.30 * depth_penalty;
  s += 0.35 * width;
  s += 0.50 * skip;
  s += 0.15 * conv3 * std::min(m.width, 3) / 3.0;
  if (interior > 0 && counts[2] == interior) s -= 0.60;
  s += 0.60 * (std::log10(static_cast<double>(params)) - 6.7);
  return s;
}

inline double structural_score(const ModelSpec& cell) { return structural_score(cell, parameter_count(cell)); }

// Mean and standard deviation of structural_score over the (7, 9) space.
inline constexpr double kScoreCenter = 1.734817;
inline constexpr double kScoreScale = 1.261171;

class SyntheticOracle final : public Oracle {
 public:
  SyntheticOracle(std::shared_ptr<const SpaceIndex> index, std::uint64_t seed, SurrogateParams params = {})
      : index_(std::move(index)), seed_(seed), params_(params) {
    cells_.reserve(index_->size());
    for (const auto& cell : index_->cells()) {
      CellFeatures f;
      f.params = parameter_count(cell.spec);
      f.quality = params_.locality * (structural_score(cell.spec, f.params) - kScoreCenter) / kScoreScale +
                  params_.ruggedness * keyed_normal(cell.digest, "cell", 0, 0);
      cells_.push_back(f);
    }
  }

  std::string_view backend() const override { return "synthetic"; }
  const SpaceIndex& index() const override { return *index_; }
  std::uint64_t seed() const { return seed_; }
  const SurrogateParams& params() const { return params_; }

  EvaluationRecord record(const Digest& digest, int epochs, int trial) const override {
    require_budget(epochs);
    detail::require_trial(trial);
    const std::ptrdiff_t pos = index_->find(digest);
    if (pos < 0) detail::unknown_architecture(digest);
    const CellFeatures& f = cells_[static_cast<std::size_t>(pos)];
    const int b = budget_slot(epochs);

    const double mean_valid = mean_validation(digest, f.quality, b);
    EvaluationRecord r;
    r.digest = digest;
    r.epochs = epochs;
    r.trial = trial;
    r.validation_accuracy =
        std::clamp(mean_valid + params_.trial_noise[b] * keyed_normal(digest, "valid", epochs, trial), 0.0, 1.0);
    r.test_accuracy = std::clamp(r.validation_accuracy + params_.test_bias +
                                     params_.test_offset_sd * keyed_normal(digest, "test", epochs, trial),
                                 0.0, 1.0);
    const double fit = params_.train_fit[b];
    r.train_accuracy = std::clamp(mean_valid + (1.0 - mean_valid) * fit +
                                      0.5 * params_.trial_noise[b] * keyed_normal(digest, "train", epochs, trial),
                                  0.0, 1.0);
    const double jitter = std::clamp(keyed_normal(digest, "time", epochs, trial), -3.0, 3.0) * params_.time_jitter;
    r.training_seconds = params_.time_scale * static_cast<double>(f.params) * epochs * std::exp(jitter);
    r.parameter_count = f.params;
    return r;
  }

 private:
  struct CellFeatures {
    double quality = 0.0;
    std::int64_t params = 0;
  };

  double keyed_normal(const Digest& digest, std::string_view purpose, int epochs, int trial) const {
    const std::array<std::uint64_t, 6> words{seed_,
                                             digest.high(),
                                             digest.low(),
                                             fnv1a64(purpose),
                                             static_cast<std::uint64_t>(epochs),
                                             static_cast<std::uint64_t>(trial)};
    return normal_from_key(hash_words(words));
  }

  double mean_validation(const Digest& digest, double quality, int b) const {
    const double q = quality + params_.spread[b] * keyed_normal(digest, "budget", kEpochBudgets[b], 0);
    const double x = params_.slope * q + params_.offset[b];
    return params_.floor + (params_.ceiling[b] - params_.floor) / (1.0 + std::exp(-x));
  }

  std::shared_ptr<const SpaceIndex> index_;
  std::uint64_t seed_;
  SurrogateParams params_;
  std::vector<CellFeatures> cells_;
};

inline std::unique_ptr<SyntheticOracle> make_synthetic(std::shared_ptr<const SpaceIndex> index, std::uint64_t seed,
                                                       SurrogateParams params = {}) {
  return std::make_unique<SyntheticOracle>(std::move(index), seed, params);
}

// ---------------------------------------------------------------------------
// Query semantics.
// ---------------------------------------------------------------------------

/// Canonicalizes the spec, draws a trial uniformly from {1, 2, 3} and
/// returns that record.
inline EvaluationRecord query(const Oracle& oracle, const ModelSpec& spec, int epochs, Rng& rng) {
  require_budget(epochs);
  if (!is_valid(spec)) throw ValidityError("query requires a valid cell");
  const Digest digest = canonical_hash(spec);
  const int trial = 1 + rng.below_int(kTrials);
  return oracle.record(digest, epochs, trial);
}

/// Mean test accuracy over the three trials at 108 epochs.
inline double mean_test_accuracy(const Oracle& oracle, const Digest& digest) {
  std::array<double, kTrials> acc{};
  for (int t = 1; t <= kTrials; ++t) acc[t - 1] = oracle.record(digest, kMaxEpochs, t).test_accuracy;
  return stats::sum(acc) / kTrials;
}

inline double mean_test_accuracy(const Oracle& oracle, const ModelSpec& spec) {
  if (!is_valid(spec)) throw ValidityError("mean_test_accuracy requires a valid cell");
  return mean_test_accuracy(oracle, canonical_hash(spec));
}

/// Trial-mean of a metric at `epochs`.
inline double mean_validation_accuracy(const Oracle& oracle, const Digest& digest, int epochs = kMaxEpochs) {
  std::array<double, kTrials> acc{};
  for (int t = 1; t <= kTrials; ++t) acc[t - 1] = oracle.record(digest, epochs, t).validation_accuracy;
  return stats::sum(acc) / kTrials;
}

struct BestCell {
  Digest digest;
  double mean_test_accuracy;
};

/// Cell with the highest mean test accuracy; ties go to the smaller digest.
inline BestCell best_cell(const Oracle& oracle) {
  const auto& cells = oracle.index().cells();
  if (cells.empty()) throw PreconditionError("oracle index is empty");
  BestCell best{cells.front().digest, mean_test_accuracy(oracle, cells.front().digest)};
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const double acc = mean_test_accuracy(oracle, cells[i].digest);
    if (acc > best.mean_test_accuracy) best = {cells[i].digest, acc};
  }
  return best;
}

}  // namespace nasbench
