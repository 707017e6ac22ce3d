#include <gtest/gtest.h>

#include <mutex>
#include <set>

#include "../support/fixtures.hpp"

using namespace nasbench;

namespace {

/// Forwards to another oracle; test accuracies replaced by a sentinel.
class PoisonedOracle final : public Oracle {
 public:
  explicit PoisonedOracle(const Oracle& inner) : inner_(inner) {}
  std::string_view backend() const override { return "poisoned"; }
  const SpaceIndex& index() const override { return inner_.index(); }
  EvaluationRecord record(const Digest& d, int e, int t) const override {
    auto r = inner_.record(d, e, t);
    r.test_accuracy = (d.low() % 2) ? 0.0 : 1.0;
    return r;
  }

 private:
  const Oracle& inner_;
};

/// Forwards to another oracle and logs every record request.
class LoggingOracle final : public Oracle {
 public:
  explicit LoggingOracle(const Oracle& inner) : inner_(inner) {}
  std::string_view backend() const override { return "logging"; }
  const SpaceIndex& index() const override { return inner_.index(); }
  EvaluationRecord record(const Digest& d, int e, int t) const override {
    auto r = inner_.record(d, e, t);
    std::lock_guard lock(mu_);
    log.push_back(r);
    return r;
  }
  mutable std::vector<EvaluationRecord> log;

 private:
  const Oracle& inner_;
  mutable std::mutex mu_;
};

/// Validation accuracy = share of CONV1X1 among the interior vertices.
class Conv1x1Oracle final : public Oracle {
 public:
  explicit Conv1x1Oracle(std::shared_ptr<const SpaceIndex> index) : index_(std::move(index)) {}
  std::string_view backend() const override { return "conv1x1"; }
  const SpaceIndex& index() const override { return *index_; }
  EvaluationRecord record(const Digest& d, int e, int t) const override {
    const auto& spec = index_->cells()[static_cast<std::size_t>(index_->find(d))].spec;
    double share = 0.0;
    for (Op op : spec.ops()) share += op == Op::Conv1x1;
    if (spec.num_interior() > 0) share /= spec.num_interior();
    return {d, e, t, 1.0, 0.5 + 0.4 * share, 0.5 + 0.4 * share, 100.0 * e, 1};
  }

 private:
  std::shared_ptr<const SpaceIndex> index_;
};

class SearchTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    oracle_ = make_synthetic(fixtures::space(6), 7).release();
    best_ = best_cell(*oracle_).mean_test_accuracy;
  }
  static void TearDownTestSuite() {
    delete oracle_;
    oracle_ = nullptr;
  }
  static SearchConfig config(Algorithm a, double budget = 3e5, std::uint64_t seed = 1) {
    SearchConfig c;
    c.algorithm = a;
    c.time_budget = budget;
    c.seed = seed;
    return c;
  }
  static SyntheticOracle* oracle_;
  static double best_;
};

SyntheticOracle* SearchTest::oracle_ = nullptr;
double SearchTest::best_ = 0.0;

constexpr std::array<Algorithm, 5> kAll{Algorithm::RandomSearch, Algorithm::RegularizedEvolution,
                                        Algorithm::NonRegularizedEvolution, Algorithm::Reinforce,
                                        Algorithm::Hyperband};

std::vector<std::pair<Digest, double>> incumbents(const RunTrace& t) {
  std::vector<std::pair<Digest, double>> out;
  for (const auto& e : t.events) out.emplace_back(e.incumbent, e.time_s);
  return out;
}

}  // namespace

TEST(SearchConfig, Validation) {
  SearchConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.population_size, 100);
  EXPECT_EQ(c.tournament_size, 10);
  EXPECT_EQ(c.eta, 3);
  EXPECT_DOUBLE_EQ(c.learning_rate, 0.5);
  EXPECT_DOUBLE_EQ(c.time_budget, 1e7);
  c.time_budget = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.tournament_size = 101;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.eta = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.rung_budgets = {4, 12, 36, 100};
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_algorithm("nre"), Algorithm::NonRegularizedEvolution);
  EXPECT_THROW(parse_algorithm("smac"), ConfigError);
}

TEST_F(SearchTest, TinyBudgetGivesOneEvaluation) {
  for (Algorithm a : kAll) {
    Rng rng(1);
    const auto t = run_search(*oracle_, config(a, 1e-3), rng);
    EXPECT_EQ(t.events.size(), 1U) << algorithm_name(a);
    EXPECT_EQ(t.final_evals, 1);
    EXPECT_TRUE(t.terminal);
  }
}

TEST_F(SearchTest, FixedSeedReproducesTrace) {
  for (Algorithm a : kAll) {
    Rng r1(5), r2(5);
    const auto t1 = run_search(*oracle_, config(a), r1);
    const auto t2 = run_search(*oracle_, config(a), r2);
    EXPECT_EQ(incumbents(t1), incumbents(t2)) << algorithm_name(a);
    EXPECT_EQ(t1.final_time, t2.final_time);
  }
}

TEST_F(SearchTest, ClockAndIncumbentMatchQueries) {
  for (Algorithm a : kAll) {
    LoggingOracle logged(*oracle_);
    Rng rng(6);
    const auto t = run_search(logged, config(a), rng);
    double clock = 0.0, best_valid = -1.0;
    for (const auto& r : logged.log) {
      clock += r.training_seconds;
      best_valid = std::max(best_valid, r.validation_accuracy);
    }
    EXPECT_EQ(t.final_time, clock) << algorithm_name(a);
    EXPECT_EQ(t.final_evals, static_cast<std::int64_t>(logged.log.size()));
    EXPECT_EQ(t.events.back().incumbent_validation, best_valid);
    EXPECT_GT(t.final_time, 3e5);
    EXPECT_LE(t.final_time - logged.log.back().training_seconds, 3e5);
    for (std::size_t i = 1; i < t.events.size(); ++i) {
      EXPECT_GT(t.events[i].time_s, t.events[i - 1].time_s);
      EXPECT_GT(t.events[i].incumbent_validation, t.events[i - 1].incumbent_validation);
    }
  }
}

TEST_F(SearchTest, TestAccuracyNeverSteersSearch) {
  const PoisonedOracle poisoned(*oracle_);
  for (Algorithm a : kAll) {
    Rng r1(8), r2(8);
    const auto clean = run_search(*oracle_, config(a), r1);
    const auto dirty = run_search(poisoned, config(a), r2);
    EXPECT_EQ(incumbents(clean), incumbents(dirty)) << algorithm_name(a);
  }
}

TEST(Tournament, SelectionRule) {
  std::vector<Member> pop;
  for (int i = 0; i < 10; ++i) pop.push_back({ModelSpec{}, Digest{}, static_cast<double>((i * 7) % 10), i});
  Rng rng(3);
  for (int k = 0; k < 200; ++k) EXPECT_EQ(pop[tournament_winner(pop, 10, rng)].fitness, 9.0);
  std::array<int, 10> wins{};
  for (int k = 0; k < 20000; ++k) ++wins[tournament_winner(pop, 1, rng)];
  for (int w : wins) EXPECT_NEAR(w, 2000, 200);
  for (int k = 0; k < 2000; ++k) EXPECT_NE(pop[tournament_winner(pop, 2, rng)].fitness, 0.0);
  // Ties go to the earlier-born member.
  std::vector<Member> tied(4, Member{ModelSpec{}, Digest{}, 0.5, 0});
  for (int i = 0; i < 4; ++i) tied[i].born = 10 - i;
  EXPECT_EQ(tournament_winner(tied, 4, rng), 3U);
  EXPECT_THROW(tournament_winner(tied, 5, rng), PreconditionError);
}

TEST(Tournament, RemovalRule) {
  std::vector<Member> pop{{ModelSpec{}, Digest{}, 0.9, 5}, {ModelSpec{}, Digest{}, 0.2, 7},
                          {ModelSpec{}, Digest{}, 0.2, 6}, {ModelSpec{}, Digest{}, 0.5, 3}};
  EXPECT_EQ(removal_index(pop, true), 3U);
  EXPECT_EQ(removal_index(pop, false), 2U);
}

TEST_F(SearchTest, RegularizedPopulationHoldsLatestInsertions) {
  SearchConfig c = config(Algorithm::RegularizedEvolution, 1e9);
  c.population_size = 20;
  c.tournament_size = 5;
  Evolution evo(*oracle_, c, true);
  Rng rng(2);
  for (int i = 0; i < 500; ++i) evo.step(rng);
  std::set<std::int64_t> born;
  for (const auto& m : evo.population()) born.insert(m.born);
  EXPECT_EQ(born.size(), 20U);
  EXPECT_EQ(*born.begin(), 480);
  EXPECT_EQ(*born.rbegin(), 499);
}

TEST_F(SearchTest, NonRegularizedPopulationKeepsFittest) {
  SearchConfig c = config(Algorithm::NonRegularizedEvolution, 1e9);
  c.population_size = 20;
  c.tournament_size = 5;
  Evolution evo(*oracle_, c, false);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) evo.step(rng);
  double worst = 1.0;
  for (const auto& m : evo.population()) worst = std::min(worst, m.fitness);
  for (int i = 0; i < 300; ++i) {
    evo.step(rng);
    double w = 1.0;
    for (const auto& m : evo.population()) w = std::min(w, m.fitness);
    EXPECT_GE(w, worst);
    worst = w;
    EXPECT_EQ(evo.population().size(), 20U);
  }
}

TEST_F(SearchTest, ReinforceZeroLearningRateStaysUniform) {
  SearchConfig c = config(Algorithm::Reinforce, 1e6);
  c.learning_rate = 0.0;
  Rng rng(4);
  ReinforceController ctl;
  run_reinforce(*oracle_, c, rng, &ctl);
  std::int64_t on = 0;
  constexpr int kSamples = 100000;
  for (int i = 0; i < kSamples; ++i) on += std::popcount(ctl.sample(rng).edges);
  EXPECT_NEAR(static_cast<double>(on) / (kSamples * 21.0), 0.5, 0.01);
  EXPECT_DOUBLE_EQ(ctl.edge_probability(0), 0.5);
}

TEST(Reinforce, LearnsDominantOperation) {
  const Conv1x1Oracle o(fixtures::space(6));
  SearchConfig c;
  c.algorithm = Algorithm::Reinforce;
  c.time_budget = 100.0 * 108 * 4000;
  Rng rng(11);
  ReinforceController ctl;
  run_reinforce(o, c, rng, &ctl);
  // Marginal of CONV1X1 over the vertices that survive pruning.
  int live = 0, conv1 = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto s = ctl.sample(rng);
    const auto spec = spec_from_encoding(s.edges, s.ops);
    if (!is_valid(spec)) continue;
    for (Op op : prune(spec).ops()) {
      ++live;
      conv1 += op == Op::Conv1x1;
    }
  }
  ASSERT_GT(live, 1000);
  EXPECT_GT(static_cast<double>(conv1) / live, 0.9);
}

TEST(Hyperband, BracketArithmetic) {
  const auto b = hyperband_brackets(3);
  ASSERT_EQ(b.size(), 4U);
  EXPECT_EQ(b[0].sizes, (std::vector<int>{27, 9, 3, 1}));
  EXPECT_EQ(b[0].first_rung, 0);
  EXPECT_EQ(b[1].sizes, (std::vector<int>{18, 6, 2}));
  EXPECT_EQ(b[2].sizes, (std::vector<int>{6, 2}));
  EXPECT_EQ(b[3].sizes, (std::vector<int>{4}));
  EXPECT_EQ(b[3].first_rung, 3);
}

TEST_F(SearchTest, HyperbandRungsAndPromotions) {
  LoggingOracle logged(*oracle_);
  std::vector<RungLog> rungs;
  Rng rng(13);
  run_hyperband(logged, config(Algorithm::Hyperband, 2e6), rng, &rungs);
  for (const auto& r : logged.log) EXPECT_NE(budget_slot(r.epochs), -1);
  ASSERT_GT(rungs.size(), 10U);
  for (const auto& r : rungs) {
    std::vector<bool> kept(r.scores.size(), false);
    for (auto k : r.promoted) kept[k] = true;
    for (std::size_t i = 0; i < r.scores.size(); ++i)
      for (std::size_t j = 0; j < r.scores.size(); ++j)
        if (kept[i] && !kept[j]) {
          EXPECT_GE(r.scores[i], r.scores[j]);
        }
    if (r.rung < 3) {
      EXPECT_EQ(r.promoted.size(), r.scores.size() / 3);
    }
  }
}

TEST_F(SearchTest, RepeatRunsAreIndependentOfBatchingAndJobs) {
  const auto cfg = config(Algorithm::RegularizedEvolution);
  const auto batch = repeat_runs(*oracle_, cfg, 6, 1);
  const auto threaded = repeat_runs(*oracle_, cfg, 6, 3);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Rng rng = run_stream(cfg.seed, i);
    const auto alone = run_search(*oracle_, cfg, rng);
    EXPECT_EQ(incumbents(alone), incumbents(batch[i]));
    EXPECT_EQ(incumbents(threaded[i]), incumbents(batch[i]));
  }
  EXPECT_NE(batch[0].events.front().incumbent, batch[1].events.front().incumbent);
  EXPECT_THROW(repeat_runs(*oracle_, cfg, 0), PreconditionError);
}

TEST_F(SearchTest, RegretOfBestIsZero) {
  const auto best = best_cell(*oracle_);
  RunTrace t;
  t.events.push_back({10.0, 1, best.digest, 0.9, 108});
  t.final_time = 10.0;
  t.final_evals = 1;
  const auto scored = score_trace(t, *oracle_, best.mean_test_accuracy);
  EXPECT_EQ(scored.front().regret, 0.0);
  EXPECT_EQ(final_regret(t, *oracle_, best.mean_test_accuracy), 0.0);
}

TEST_F(SearchTest, RegretCurveOnRequestedGrid) {
  const auto traces = repeat_runs(*oracle_, config(Algorithm::RandomSearch), 10);
  const std::vector<double> grid{1.0, 1e3, 1e4, 1e5, 3e5};
  const auto curve = regret_curve(traces, *oracle_, grid, best_);
  ASSERT_EQ(curve.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(curve[i].time_s, grid[i]);
  EXPECT_TRUE(std::isnan(curve[0].mean));  // nothing finishes within one second
  EXPECT_EQ(curve.back().runs, 10U);
  for (const auto& p : curve) {
    if (p.runs == 0) continue;
    EXPECT_LE(p.q25, p.q50);
    EXPECT_LE(p.q50, p.q75);
    EXPECT_GE(p.q25, 0.0 - 1e-12);
  }
  const auto g = log_grid(1e7, 5);
  EXPECT_DOUBLE_EQ(g.front(), 1e3);
  EXPECT_EQ(g.back(), 1e7);
}

TEST_F(SearchTest, RobustnessEcdf) {
  const auto cfg = config(Algorithm::RandomSearch);
  const auto traces = repeat_runs(*oracle_, cfg, 20);
  const auto e = robustness_ecdf(traces, *oracle_, cfg.time_budget * 10, best_);
  ASSERT_FALSE(e.empty());
  EXPECT_DOUBLE_EQ(e.back().second, 1.0);
  for (std::size_t i = 1; i < e.size(); ++i) {
    EXPECT_GT(e[i].first, e[i - 1].first);
    EXPECT_GT(e[i].second, e[i - 1].second);
  }
  std::vector<RunTrace> same(5, traces[0]);
  const auto step = robustness_ecdf(same, *oracle_, cfg.time_budget * 10, best_);
  ASSERT_EQ(step.size(), 1U);
  EXPECT_DOUBLE_EQ(step[0].second, 1.0);
}

TEST_F(SearchTest, TraceCsv) {
  Rng rng(1);
  const auto t = run_search(*oracle_, config(Algorithm::RandomSearch), rng);
  std::ostringstream out;
  write_trace_csv(out, t, *oracle_, best_);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "time_s,evals,best_valid_acc,mean_test_acc,test_regret");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), t.events.size() + 2);
}
