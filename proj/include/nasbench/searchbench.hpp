#pragma once

// Benchmarking protocol and search algorithms.
//
// Searches see the oracle only through SearchOracle, whose observations
// carry no test accuracy. Every charged query advances a simulated clock by
// its recorded training time; a run stops after the evaluation that pushes
// the clock past the budget. Test accuracy and regret are attached
// afterwards by score_trace.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "nasbench/csv.hpp"
#include "nasbench/encoding.hpp"
#include "nasbench/oracle.hpp"
#include "nasbench/stats.hpp"

namespace nasbench {

enum class Algorithm { RandomSearch, RegularizedEvolution, NonRegularizedEvolution, Reinforce, Hyperband };

inline constexpr std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::RandomSearch: return "rs";
    case Algorithm::RegularizedEvolution: return "re";
    case Algorithm::NonRegularizedEvolution: return "nre";
    case Algorithm::Reinforce: return "reinforce";
    case Algorithm::Hyperband: return "hb";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::RandomSearch, Algorithm::RegularizedEvolution, Algorithm::NonRegularizedEvolution,
                      Algorithm::Reinforce, Algorithm::Hyperband})
    if (algorithm_name(a) == name) return a;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected rs, re, nre, reinforce or hb)");
}

struct SearchConfig {
  Algorithm algorithm = Algorithm::RandomSearch;
  double time_budget = 1e7;  // simulated seconds
  int population_size = 100;
  int tournament_size = 10;
  double learning_rate = 0.5;
  double baseline_decay = 0.9;
  int eta = 3;
  std::vector<int> rung_budgets{kEpochBudgets.begin(), kEpochBudgets.end()};
  std::uint64_t seed = 0;

  void validate() const {
    if (!(time_budget > 0.0)) throw ConfigError("time budget must be positive");
    if (population_size < 1 || tournament_size < 1) throw ConfigError("population and tournament sizes must be positive");
    if (tournament_size > population_size) throw ConfigError("tournament size cannot exceed population size");
    if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
    if (!(baseline_decay >= 0.0 && baseline_decay < 1.0)) throw ConfigError("baseline decay must lie in [0, 1)");
    if (eta != 3) throw ConfigError("hyperband requires eta = 3");
    if (!std::equal(rung_budgets.begin(), rung_budgets.end(), kEpochBudgets.begin(), kEpochBudgets.end()))
      throw ConfigError("hyperband rung budgets must be exactly 4, 12, 36, 108");
  }
};

// ---------------------------------------------------------------------------
// Validation-only view of an oracle.
// ---------------------------------------------------------------------------

struct Observation {
  Digest digest;
  int epochs;
  int trial;
  double validation_accuracy;
  double training_seconds;
};

class SearchOracle {
 public:
  explicit SearchOracle(const Oracle& oracle) : oracle_(&oracle) {}

  /// Digest of `spec` if it is valid and present in the oracle.
  std::optional<Digest> admit(const ModelSpec& spec) const {
    if (!is_valid(spec)) return std::nullopt;
    const Digest d = canonical_hash(spec);
    if (!oracle_->contains(d)) return std::nullopt;
    return d;
  }

  Observation evaluate(const Digest& digest, int epochs, Rng& rng) const {
    require_budget(epochs);
    const int trial = 1 + rng.below_int(kTrials);
    const EvaluationRecord r = oracle_->record(digest, epochs, trial);
    return {digest, epochs, trial, r.validation_accuracy, r.training_seconds};
  }

  Observation query(const ModelSpec& spec, int epochs, Rng& rng) const {
    require_budget(epochs);
    if (!is_valid(spec)) throw ValidityError("query requires a valid cell");
    return evaluate(canonical_hash(spec), epochs, rng);
  }

 private:
  const Oracle* oracle_;
};

// ---------------------------------------------------------------------------
// Traces.
// ---------------------------------------------------------------------------

/// Incumbent change: state right after evaluation number `evals`.
struct TraceEvent {
  double time_s;
  std::int64_t evals;
  Digest incumbent;
  double incumbent_validation;
  int incumbent_epochs;
};

struct RunTrace {
  std::vector<TraceEvent> events;
  double final_time = 0.0;
  std::int64_t final_evals = 0;
  bool terminal = false;  // stopped by the time budget (not by a guard)
};

/// Clock, evaluation count and incumbent of one run.
class RunRecorder {
 public:
  explicit RunRecorder(double budget) : budget_(budget) {}

  /// Charges one evaluation; returns true while budget remains.
  bool charge(const Observation& obs) {
    clock_ += obs.training_seconds;
    ++evals_;
    if (trace_.events.empty() || obs.validation_accuracy > trace_.events.back().incumbent_validation)
      trace_.events.push_back({clock_, evals_, obs.digest, obs.validation_accuracy, obs.epochs});
    return !exhausted();
  }

  bool exhausted() const { return clock_ > budget_; }
  double clock() const { return clock_; }
  std::int64_t evals() const { return evals_; }

  RunTrace finish(bool terminal = true) {
    trace_.final_time = clock_;
    trace_.final_evals = evals_;
    trace_.terminal = terminal;
    return std::move(trace_);
  }

 private:
  double budget_;
  double clock_ = 0.0;
  std::int64_t evals_ = 0;
  RunTrace trace_;
};

// ---------------------------------------------------------------------------
// Random search.
// ---------------------------------------------------------------------------

namespace detail {

/// Uniform valid encoding that the oracle contains (rejection, zero cost).
inline std::pair<ModelSpec, Digest> sample_admitted(const SearchOracle& oracle, Rng& rng) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    ModelSpec s = random_encoding(rng);
    if (auto d = oracle.admit(s)) return {std::move(s), *d};
    if (attempt > 100'000'000) throw PreconditionError("oracle admits no sampled cell");
  }
}

}  // namespace detail

inline RunTrace run_random_search(const Oracle& oracle, const SearchConfig& cfg, Rng& rng) {
  cfg.validate();
  const SearchOracle view(oracle);
  RunRecorder rec(cfg.time_budget);
  for (;;) {
    const auto [spec, digest] = detail::sample_admitted(view, rng);
    if (!rec.charge(view.evaluate(digest, kMaxEpochs, rng))) break;
  }
  return rec.finish();
}

// ---------------------------------------------------------------------------
// Evolution (regularized: remove oldest; non-regularized: remove worst).
// ---------------------------------------------------------------------------

struct Member {
  ModelSpec spec;
  Digest digest;
  double fitness;
  std::int64_t born;  // insertion counter
};

/// Index of the winner among `tournament_size` members drawn without
/// replacement; ties go to the earlier-born member.
inline std::size_t tournament_winner(std::span<const Member> population, int tournament_size, Rng& rng) {
  const std::size_t n = population.size();
  if (tournament_size < 1 || static_cast<std::size_t>(tournament_size) > n)
    throw PreconditionError("tournament size must lie in [1, population size]");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t best = n;
  for (int k = 0; k < tournament_size; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(idx[k], idx[j]);
    const std::size_t c = idx[k];
    if (best == n || population[c].fitness > population[best].fitness ||
        (population[c].fitness == population[best].fitness && population[c].born < population[best].born))
      best = c;
  }
  return best;
}

/// Member removed after a child is appended: the oldest (regularized) or
/// the lowest fitness, oldest among ties.
inline std::size_t removal_index(std::span<const Member> population, bool regularized) {
  if (population.empty()) throw PreconditionError("empty population");
  std::size_t out = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    const Member& a = population[i];
    const Member& b = population[out];
    if (regularized ? a.born < b.born : (a.fitness < b.fitness || (a.fitness == b.fitness && a.born < b.born)))
      out = i;
  }
  return out;
}

/// Evolution state machine; exposed for inspection in tests.
class Evolution {
 public:
  Evolution(const Oracle& oracle, const SearchConfig& cfg, bool regularized)
      : view_(oracle), cfg_(cfg), regularized_(regularized), rec_(cfg.time_budget) {
    cfg_.validate();
  }

  /// Runs to completion.
  RunTrace run(Rng& rng) {
    while (!done_) step(rng);
    return rec_.finish();
  }

  /// One evaluation: a random member while seeding, otherwise a mutated
  /// tournament winner.
  void step(Rng& rng) {
    if (done_) return;
    if (population_.size() < static_cast<std::size_t>(cfg_.population_size)) {
      auto [spec, digest] = detail::sample_admitted(view_, rng);
      insert(std::move(spec), digest, rng);
      return;
    }
    const std::size_t w = tournament_winner(population_, cfg_.tournament_size, rng);
    std::optional<Digest> child_digest;
    ModelSpec child = mutate_if(population_[w].spec, rng, [&](const ModelSpec& c) {
      child_digest = view_.admit(c);
      return child_digest.has_value();
    });
    insert(std::move(child), *child_digest, rng);
    if (population_.size() > static_cast<std::size_t>(cfg_.population_size))
      population_.erase(population_.begin() + static_cast<std::ptrdiff_t>(removal_index(population_, regularized_)));
  }

  const std::vector<Member>& population() const { return population_; }
  bool done() const { return done_; }
  std::int64_t evaluations() const { return rec_.evals(); }

 private:
  void insert(ModelSpec spec, const Digest& digest, Rng& rng) {
    const Observation obs = view_.evaluate(digest, kMaxEpochs, rng);
    population_.push_back({std::move(spec), digest, obs.validation_accuracy, born_++});
    done_ = !rec_.charge(obs);
  }

  SearchOracle view_;
  SearchConfig cfg_;
  bool regularized_;
  RunRecorder rec_;
  std::vector<Member> population_;
  std::int64_t born_ = 0;
  bool done_ = false;
};

inline RunTrace run_evolution(const Oracle& oracle, const SearchConfig& cfg, Rng& rng, bool regularized) {
  Evolution evo(oracle, cfg, regularized);
  return evo.run(rng);
}

// ---------------------------------------------------------------------------
// REINFORCE with a factorized categorical policy.
// ---------------------------------------------------------------------------

class ReinforceController {
 public:
  struct Sample {
    std::uint32_t edges;
    std::array<Op, kMaxInterior> ops;
  };

  Sample sample(Rng& rng) const {
    Sample s{0, {}};
    for (int e = 0; e < kEncodedEdges; ++e)
      if (rng.uniform() < edge_probability(e)) s.edges |= 1U << e;
    for (int v = 0; v < kMaxInterior; ++v) {
      const auto p = op_probabilities(v);
      const double u = rng.uniform();
      int k = 0;
      double acc = p[0];
      while (k + 1 < kNumOps && u >= acc) acc += p[++k];
      s.ops[v] = kAllOps[k];
    }
    return s;
  }

  /// logits += step * grad log p(sample).
  void update(const Sample& s, double step) {
    for (int e = 0; e < kEncodedEdges; ++e) {
      const double p1 = edge_probability(e);
      const bool on = (s.edges >> e) & 1U;
      edge_logits_[e][1] += step * ((on ? 1.0 : 0.0) - p1);
      edge_logits_[e][0] += step * ((on ? 0.0 : 1.0) - (1.0 - p1));
    }
    for (int v = 0; v < kMaxInterior; ++v) {
      const auto p = op_probabilities(v);
      const int chosen = static_cast<int>(s.ops[v]);
      for (int k = 0; k < kNumOps; ++k) op_logits_[v][k] += step * ((k == chosen ? 1.0 : 0.0) - p[k]);
    }
  }

  /// Probability that edge slot `e` is present.
  double edge_probability(int e) const {
    return 1.0 / (1.0 + std::exp(edge_logits_[e][0] - edge_logits_[e][1]));
  }

  std::array<double, kNumOps> op_probabilities(int v) const {
    const auto& l = op_logits_[v];
    const double m = *std::max_element(l.begin(), l.end());
    std::array<double, kNumOps> p{};
    double z = 0.0;
    for (int k = 0; k < kNumOps; ++k) z += p[k] = std::exp(l[k] - m);
    for (auto& x : p) x /= z;
    return p;
  }

 private:
  std::array<std::array<double, 2>, kEncodedEdges> edge_logits_{};
  std::array<std::array<double, kNumOps>, kMaxInterior> op_logits_{};
};

/// Consecutive rejected samples after which a REINFORCE run gives up.
inline constexpr std::int64_t kReinforceRejectLimit = 10'000'000;

inline RunTrace run_reinforce(const Oracle& oracle, const SearchConfig& cfg, Rng& rng,
                              ReinforceController* controller_out = nullptr) {
  cfg.validate();
  const SearchOracle view(oracle);
  RunRecorder rec(cfg.time_budget);
  ReinforceController controller;
  double baseline = 0.0;
  std::int64_t rejected = 0;
  bool terminal = true;
  for (;;) {
    const auto s = controller.sample(rng);
    const ModelSpec spec = spec_from_encoding(s.edges, s.ops);
    double reward = 0.0;
    bool more = true;
    if (auto digest = view.admit(spec)) {
      const Observation obs = view.evaluate(*digest, kMaxEpochs, rng);
      reward = obs.validation_accuracy;
      more = rec.charge(obs);
      rejected = 0;
    } else if (++rejected >= kReinforceRejectLimit) {
      terminal = false;
      break;
    }
    controller.update(s, cfg.learning_rate * (reward - baseline));
    baseline = cfg.baseline_decay * baseline + (1.0 - cfg.baseline_decay) * reward;
    if (!more) break;
  }
  if (controller_out) *controller_out = controller;
  return rec.finish(terminal);
}

// ---------------------------------------------------------------------------
// Hyperband over the four budgets.
// ---------------------------------------------------------------------------

struct Bracket {
  int s;
  int first_rung;          // index into kEpochBudgets
  std::vector<int> sizes;  // configurations evaluated at each rung from first_rung
};

/// Brackets s = s_max..0 with n = ceil((s_max + 1) / (s + 1)) * eta^s.
inline std::vector<Bracket> hyperband_brackets(int eta = 3) {
  const int s_max = static_cast<int>(kEpochBudgets.size()) - 1;
  std::vector<Bracket> out;
  for (int s = s_max; s >= 0; --s) {
    int n = (s_max + 1 + s) / (s + 1);
    for (int k = 0; k < s; ++k) n *= eta;
    Bracket b{s, s_max - s, {}};
    for (int r = b.first_rung; r <= s_max; ++r) {
      b.sizes.push_back(n);
      n /= eta;
    }
    out.push_back(std::move(b));
  }
  return out;
}

/// Indices of the `keep` best scores; ties keep the earlier index.
inline std::vector<std::size_t> promote(std::span<const double> scores, std::size_t keep) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(std::min(keep, idx.size()));
  return idx;
}

/// Optional observer of hyperband rungs: (bracket s, rung index, digests, scores, promoted indices).
struct RungLog {
  int s;
  int rung;
  std::vector<Digest> digests;
  std::vector<double> scores;
  std::vector<std::size_t> promoted;
};

inline RunTrace run_hyperband(const Oracle& oracle, const SearchConfig& cfg, Rng& rng,
                              std::vector<RungLog>* log = nullptr) {
  cfg.validate();
  const SearchOracle view(oracle);
  RunRecorder rec(cfg.time_budget);
  const auto brackets = hyperband_brackets(cfg.eta);
  for (;;) {
    for (const auto& b : brackets) {
      std::vector<Digest> current;
      current.reserve(b.sizes.front());
      for (int i = 0; i < b.sizes.front(); ++i) current.push_back(detail::sample_admitted(view, rng).second);
      for (std::size_t r = 0; r < b.sizes.size(); ++r) {
        const int rung = b.first_rung + static_cast<int>(r);
        std::vector<double> scores;
        scores.reserve(current.size());
        for (const auto& d : current) {
          const Observation obs = view.evaluate(d, kEpochBudgets[rung], rng);
          scores.push_back(obs.validation_accuracy);
          if (!rec.charge(obs)) return rec.finish();
        }
        std::vector<std::size_t> keep;
        if (r + 1 < b.sizes.size()) keep = promote(scores, static_cast<std::size_t>(b.sizes[r + 1]));
        if (log) log->push_back({b.s, rung, current, scores, keep});
        std::vector<Digest> next;
        for (std::size_t k : keep) next.push_back(current[k]);
        current = std::move(next);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Dispatch and repeated runs.
// ---------------------------------------------------------------------------

inline RunTrace run_search(const Oracle& oracle, const SearchConfig& cfg, Rng& rng) {
  switch (cfg.algorithm) {
    case Algorithm::RandomSearch: return run_random_search(oracle, cfg, rng);
    case Algorithm::RegularizedEvolution: return run_evolution(oracle, cfg, rng, true);
    case Algorithm::NonRegularizedEvolution: return run_evolution(oracle, cfg, rng, false);
    case Algorithm::Reinforce: return run_reinforce(oracle, cfg, rng);
    case Algorithm::Hyperband: return run_hyperband(oracle, cfg, rng);
  }
  throw ConfigError("unknown algorithm");
}

/// Generator of run `i` in a batch seeded with `seed`.
inline Rng run_stream(std::uint64_t seed, std::uint64_t i) { return Rng::stream(seed, "run", i); }

/// Runs `first .. first + n_runs - 1` on up to `jobs` threads; result order is by run index.
inline std::vector<RunTrace> repeat_runs(const Oracle& oracle, const SearchConfig& cfg, int n_runs, int jobs = 1,
                                         std::uint64_t first = 0) {
  if (n_runs < 1) throw PreconditionError("n_runs must be at least 1");
  cfg.validate();
  std::vector<RunTrace> traces(static_cast<std::size_t>(n_runs));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < n_runs && !failed;) {
      try {
        Rng rng = run_stream(cfg.seed, first + static_cast<std::uint64_t>(i));
        traces[static_cast<std::size_t>(i)] = run_search(oracle, cfg, rng);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, n_runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return traces;
}

// ---------------------------------------------------------------------------
// Post-processing: test accuracy and regret.
// ---------------------------------------------------------------------------

struct ScoredEvent {
  double time_s;
  std::int64_t evals;
  Digest incumbent;
  double incumbent_validation;
  double mean_test;
  double regret;  // best mean test accuracy minus the incumbent's
};

inline std::vector<ScoredEvent> score_trace(const RunTrace& trace, const Oracle& oracle, double best_test) {
  std::vector<ScoredEvent> out;
  out.reserve(trace.events.size());
  for (const auto& e : trace.events) {
    const double t = mean_test_accuracy(oracle, e.incumbent);
    out.push_back({e.time_s, e.evals, e.incumbent, e.incumbent_validation, t, best_test - t});
  }
  return out;
}

/// Index of the incumbent event in force at time t, or -1.
inline std::ptrdiff_t event_at(const RunTrace& trace, double t) {
  const auto it = std::upper_bound(trace.events.begin(), trace.events.end(), t,
                                   [](double x, const TraceEvent& e) { return x < e.time_s; });
  return (it - trace.events.begin()) - 1;
}

/// Regret of the final incumbent, NaN for an empty trace.
inline double final_regret(const RunTrace& trace, const Oracle& oracle, double best_test) {
  if (trace.events.empty()) return std::numeric_limits<double>::quiet_NaN();
  return best_test - mean_test_accuracy(oracle, trace.events.back().incumbent);
}

struct RegretPoint {
  double time_s;
  double mean;
  double q25;
  double q50;
  double q75;
  std::size_t runs;  // runs with an incumbent at time_s
};

/// Per grid time, statistics of regret across runs that have an incumbent.
inline std::vector<RegretPoint> regret_curve(std::span<const RunTrace> traces, const Oracle& oracle,
                                             std::span<const double> grid, double best_test) {
  if (traces.empty()) throw PreconditionError("regret_curve needs at least one trace");
  std::vector<std::vector<double>> per_trace(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i)
    for (const auto& e : score_trace(traces[i], oracle, best_test)) per_trace[i].push_back(e.regret);
  std::vector<RegretPoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    std::vector<double> r;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto k = event_at(traces[i], t);
      if (k >= 0) r.push_back(per_trace[i][static_cast<std::size_t>(k)]);
    }
    if (r.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out.push_back({t, nan, nan, nan, nan, 0});
    } else {
      out.push_back({t, stats::mean(r), stats::quantile(r, 0.25), stats::quantile(r, 0.5), stats::quantile(r, 0.75),
                     r.size()});
    }
  }
  return out;
}

/// Log-spaced grid of `points` times ending at `t_max`, starting at t_max / 10^decades.
inline std::vector<double> log_grid(double t_max, int points, double decades = 4.0) {
  if (points < 2 || !(t_max > 0.0)) throw PreconditionError("grid needs >= 2 points and a positive end");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] = t_max * std::pow(10.0, -decades * (points - 1 - i) / (points - 1));
  g.back() = t_max;
  return g;
}

/// ECDF of regret at time t over runs that have an incumbent then.
inline std::vector<std::pair<double, double>> robustness_ecdf(std::span<const RunTrace> traces, const Oracle& oracle,
                                                               double t, double best_test) {
  if (traces.empty()) throw PreconditionError("robustness_ecdf needs at least one trace");
  std::vector<double> r;
  for (const auto& trace : traces) {
    const auto k = event_at(trace, t);
    if (k >= 0) r.push_back(best_test - mean_test_accuracy(oracle, trace.events[static_cast<std::size_t>(k)].incumbent));
  }
  if (r.empty()) throw UndefinedStatisticError("no run has an incumbent at the requested time");
  return stats::ecdf(std::move(r));
}

// ---------------------------------------------------------------------------
// CSV writers.
// ---------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& out, const RunTrace& trace, const Oracle& oracle, double best_test) {
  out << "time_s,evals,best_valid_acc,mean_test_acc,test_regret\n";
  const auto scored = score_trace(trace, oracle, best_test);
  for (const auto& e : scored)
    out << format_real(e.time_s) << ',' << e.evals << ',' << format_real(e.incumbent_validation) << ','
        << format_real(e.mean_test) << ',' << format_real(e.regret) << '\n';
  if (!scored.empty()) {
    const auto& last = scored.back();
    out << format_real(trace.final_time) << ',' << trace.final_evals << ',' << format_real(last.incumbent_validation)
        << ',' << format_real(last.mean_test) << ',' << format_real(last.regret) << '\n';
  }
}

inline void write_regret_csv(std::ostream& out, std::span<const RegretPoint> curve) {
  out << "time_s,mean_regret,q25,q50,q75\n";
  for (const auto& p : curve)
    out << format_real(p.time_s) << ',' << format_real(p.mean) << ',' << format_real(p.q25) << ','
        << format_real(p.q50) << ',' << format_real(p.q75) << '\n';
}

inline void write_ecdf_csv(std::ostream& out, std::span<const std::pair<double, double>> ecdf,
                           std::string_view value_column = "regret") {
  out << value_column << ",cum_fraction\n";
  for (const auto& [x, f] : ecdf) out << format_real(x) << ',' << format_real(f) << '\n';
}

}  // namespace nasbench
