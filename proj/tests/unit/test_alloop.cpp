#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <set>
#include <stdexcept>

#include "gcnal/alloop.hpp"
#include "gcnal/datasets.hpp"
#include "gcnal/error.hpp"

namespace gcnal {
namespace {

DatasetSplit small_blobs(std::uint64_t seed, double noise = 0.3) {
  Rng rng(seed);
  return generate_blobs(BlobSpec::balanced(3, 60, 4, 2.0, noise), rng);
}

LoopConfig quick_config(StrategyId id) {
  LoopConfig c;
  c.strategy = id;
  c.seed_size = 10;
  c.budget = 5;
  c.cycles = 3;
  c.subset_size = 40;
  c.trials = 2;
  c.gcn.epochs = 20;
  return c;
}

LearnerTrainer quick_trainer() {
  TrainSchedule s;
  s.epochs = 20;
  s.lr_decay_epoch = 16;
  return make_mlp_trainer(s, {8});
}

TEST(SeedPool, SizesDeterminismAndLimits) {
  Rng a(1), b(1);
  const PoolState s = seed_pool(2000, 100, a);
  EXPECT_EQ(s.labelled.size(), 100u);
  EXPECT_EQ(s.unlabelled.size(), 1900u);
  EXPECT_EQ(s.cycle, 0u);
  EXPECT_EQ(seed_pool(2000, 100, b).labelled, s.labelled);
  s.check_invariants(2000);
  Rng c(2);
  EXPECT_TRUE(seed_pool(10, 10, c).unlabelled.empty());
  EXPECT_THROW(seed_pool(10, 11, c), Error);
}

TEST(DrawSubset, SizeCoverageAndRedraw) {
  Rng rng(3);
  PoolState s = seed_pool(500, 50, rng);
  const PoolState whole = draw_subset(s, 1000, 10, rng);
  EXPECT_EQ(whole.subset, whole.unlabelled);
  const PoolState one = draw_subset(s, 100, 10, rng);
  const PoolState two = draw_subset(s, 100, 10, rng);
  EXPECT_EQ(one.subset.size(), 100u);
  EXPECT_TRUE(std::is_sorted(one.subset.begin(), one.subset.end()));
  EXPECT_NE(one.subset, two.subset);
  one.check_invariants(500);

  Rng small(4);
  const PoolState tight = seed_pool(12, 10, small);
  EXPECT_THROW(draw_subset(tight, 5, 3, small), Error);
}

TEST(PoolState, InvariantViolationsAreLogicErrors) {
  PoolState s;
  s.labelled = {0, 1};
  s.unlabelled = {1, 2};
  EXPECT_THROW(s.check_invariants(3), std::logic_error);
  s.unlabelled = {2};
  s.subset = {0};
  EXPECT_THROW(s.check_invariants(3), std::logic_error);
  s.subset = {2};
  EXPECT_NO_THROW(s.check_invariants(3));
  EXPECT_THROW(s.check_invariants(4), std::logic_error);
}

TEST(Oracle, CountsAnnotationsAndReturnsTargets) {
  const Dataset truth = Dataset::classification(Matrix{{0}, {1}, {2}}, {2, 0, 1}, 3);
  Oracle oracle(truth);
  const std::vector<std::size_t> ask{2, 0};
  const Dataset got = oracle.annotate(ask);
  EXPECT_EQ(got.labels, (std::vector<int>{1, 2}));
  EXPECT_EQ(oracle.annotations(), 2u);
}

class EveryStrategy : public ::testing::TestWithParam<StrategyId> {};

TEST_P(EveryStrategy, BudgetLawAndConservation) {
  const auto data = small_blobs(5);
  const LoopConfig cfg = quick_config(GetParam());
  const TrialStreams streams(Rng::trial_seed(cfg.base_seed, 0));
  Oracle oracle(data.train);
  Rng seed_rng = streams.seed_pool();
  TrialContext ctx{seed_pool(oracle.pool_size(), cfg.seed_size, seed_rng), {}};
  ctx.annotated = oracle.annotate(ctx.state.labelled);
  for (std::size_t c = 0; c < cfg.cycles; ++c) {
    const std::set<std::size_t> before(ctx.state.labelled.begin(), ctx.state.labelled.end());
    Rng subset_rng = streams.subset(c);
    ctx.state = draw_subset(ctx.state, cfg.subset_size, cfg.budget, subset_rng);
    const CycleRecord r = run_cycle(ctx, oracle, data.test, cfg, quick_trainer(), streams);
    EXPECT_EQ(r.cycle, c);
    EXPECT_EQ(r.labelled, cfg.seed_size + c * cfg.budget);
    EXPECT_EQ(ctx.state.cycle, c + 1);
    EXPECT_EQ(ctx.state.labelled.size(), cfg.seed_size + (c + 1) * cfg.budget);
    EXPECT_EQ(ctx.state.labelled.size() + ctx.state.unlabelled.size(), oracle.pool_size());
    EXPECT_EQ(ctx.annotated.size(), ctx.state.labelled.size());
    for (std::size_t i : before)
      EXPECT_TRUE(std::find(ctx.state.labelled.begin(), ctx.state.labelled.end(), i) !=
                  ctx.state.labelled.end());
    ctx.state.check_invariants(oracle.pool_size());
  }
  EXPECT_EQ(oracle.annotations(), cfg.seed_size + cfg.cycles * cfg.budget);
}

TEST_P(EveryStrategy, RepeatedExperimentIsBitIdentical) {
  const auto data = small_blobs(6);
  LoopConfig cfg = quick_config(GetParam());
  cfg.cycles = 2;
  const Curve a = run_experiment(data.train, data.test, cfg, quick_trainer());
  const Curve b = run_experiment(data.train, data.test, cfg, quick_trainer());
  ASSERT_EQ(a.points.size(), 3u);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].trials, b.points[i].trials);
    EXPECT_EQ(a.points[i].labelled, cfg.seed_size + i * cfg.budget);
  }
}

INSTANTIATE_TEST_SUITE_P(AllStrategies, EveryStrategy,
                         ::testing::Values(StrategyId::kRandom, StrategyId::kEntropy,
                                           StrategyId::kCoreset, StrategyId::kUncertainGcn,
                                           StrategyId::kCoreGcn),
                         [](const auto& info) { return std::string(to_string(info.param)); });

std::vector<CyclePhase> phases_of(StrategyId id) {
  const auto data = small_blobs(7);
  LoopConfig cfg = quick_config(id);
  cfg.cycles = 1;
  std::vector<CyclePhase> seen;
  run_trial(data.train, data.test, cfg, quick_trainer(), 0,
            [&](CyclePhase p) { seen.push_back(p); });
  return seen;
}

TEST(Phases, RandomSkipsGraphAndGcn) {
  const auto seen = phases_of(StrategyId::kRandom);
  EXPECT_EQ(std::count(seen.begin(), seen.end(), CyclePhase::kBuildGraph), 0);
  EXPECT_EQ(std::count(seen.begin(), seen.end(), CyclePhase::kTrainGcn), 0);
  EXPECT_EQ(std::count(seen.begin(), seen.end(), CyclePhase::kAnnotate), 1);
}

TEST(Phases, GcnStrategiesRunEveryPhaseInOrder) {
  const auto seen = phases_of(StrategyId::kUncertainGcn);
  const std::vector<CyclePhase> cycle{CyclePhase::kTrainLearner, CyclePhase::kExtractFeatures,
                                      CyclePhase::kBuildGraph,   CyclePhase::kTrainGcn,
                                      CyclePhase::kSelect,       CyclePhase::kAnnotate};
  ASSERT_GE(seen.size(), cycle.size());
  EXPECT_TRUE(std::equal(cycle.begin(), cycle.end(), seen.begin()));
}

TEST(RunExperiment, ZeroCyclesGivesSeedStageOnly) {
  const auto data = small_blobs(8);
  LoopConfig cfg = quick_config(StrategyId::kCoreGcn);
  cfg.cycles = 0;
  const Curve c = run_experiment(data.train, data.test, cfg, quick_trainer());
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_EQ(c.points[0].labelled, cfg.seed_size);
}

TEST(RunExperiment, SingleTrialHasZeroStd) {
  const auto data = small_blobs(9);
  LoopConfig cfg = quick_config(StrategyId::kRandom);
  cfg.trials = 1;
  for (const auto& p : run_experiment(data.train, data.test, cfg, quick_trainer()).points)
    EXPECT_EQ(p.stddev, 0.0);
}

TEST(RunExperiment, ParallelTrialsMatchSequential) {
  const auto data = small_blobs(10);
  LoopConfig cfg = quick_config(StrategyId::kCoreset);
  cfg.trials = 3;
  const Curve seq = run_experiment(data.train, data.test, cfg, quick_trainer());
  cfg.parallel_trials = true;
  const Curve par = run_experiment(data.train, data.test, cfg, quick_trainer());
  for (std::size_t i = 0; i < seq.points.size(); ++i)
    EXPECT_EQ(seq.points[i].trials, par.points[i].trials);
}

TEST(RunExperiment, StrategiesShareSeedPoolsAndSubsets) {
  const auto data = small_blobs(11);
  std::vector<std::vector<std::size_t>> seeds;
  for (StrategyId id : {StrategyId::kRandom, StrategyId::kCoreset}) {
    const TrialStreams streams(Rng::trial_seed(0, 0));
    Rng r = streams.seed_pool();
    seeds.push_back(seed_pool(data.train.size(), 10, r).labelled);
    (void)id;
  }
  EXPECT_EQ(seeds[0], seeds[1]);
  // Subset draws depend only on the state and the per-cycle stream.
  const TrialStreams streams(Rng::trial_seed(0, 1));
  Rng r1 = streams.seed_pool();
  const PoolState s = seed_pool(data.train.size(), 10, r1);
  Rng a = streams.subset(2), b = streams.subset(2);
  EXPECT_EQ(draw_subset(s, 40, 5, a).subset, draw_subset(s, 40, 5, b).subset);
}

TEST(RunCycle, SeparableBlobsImproveAfterOneCycle) {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = small_blobs(100 + seed, 0.8);
    LoopConfig cfg = quick_config(StrategyId::kRandom);
    cfg.seed_size = 6;
    cfg.budget = 20;
    cfg.cycles = 1;
    cfg.trials = 1;
    cfg.base_seed = seed;
    const auto recs = run_trial(data.train, data.test, cfg, quick_trainer(), 0);
    if (recs[1].metric >= recs[0].metric) ++improved;
  }
  EXPECT_GE(improved, 4);
}

// A learner outside the MLP family: nearest class mean, features = inputs.
class NearestMean final : public Learner {
 public:
  explicit NearestMean(const Dataset& d) : means_(static_cast<std::size_t>(d.num_classes), d.input_width()) {
    std::vector<double> counts(means_.rows(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto c = static_cast<std::size_t>(d.labels[i]);
      counts[c] += 1.0;
      for (std::size_t k = 0; k < d.input_width(); ++k) means_(c, k) += d.inputs(i, k);
    }
    for (std::size_t c = 0; c < means_.rows(); ++c)
      for (std::size_t k = 0; k < means_.cols(); ++k)
        if (counts[c] > 0) means_(c, k) /= counts[c];
  }
  TaskKind task() const override { return TaskKind::kClassification; }
  std::size_t input_width() const override { return means_.cols(); }
  std::size_t feature_width() const override { return means_.cols(); }
  Matrix extract_features(const Matrix& x) const override { return x; }
  Matrix predict_posterior(const Matrix& x) const override {
    Matrix d = pairwise_sqdist(x, means_);
    for (double& v : d.values()) v = -v;
    return softmax_rows(d);
  }
  double evaluate(const Dataset& test) const override {
    return accuracy(argmax_rows(predict_posterior(test.inputs)), test.labels);
  }

 private:
  Matrix means_;
};

TEST(LearnerContract, CustomLearnerRunsEveryStrategy) {
  const auto data = small_blobs(12);
  std::atomic<int> calls = 0;
  const LearnerTrainer trainer = [&](const Dataset& d, Rng&) -> std::unique_ptr<Learner> {
    ++calls;
    return std::make_unique<NearestMean>(d);
  };
  for (StrategyId id : {StrategyId::kRandom, StrategyId::kEntropy, StrategyId::kCoreset,
                        StrategyId::kUncertainGcn, StrategyId::kCoreGcn}) {
    LoopConfig cfg = quick_config(id);
    cfg.trials = 1;
    const Curve c = run_experiment(data.train, data.test, cfg, trainer);
    EXPECT_EQ(c.points.size(), cfg.cycles + 1);
  }
  EXPECT_EQ(calls.load(), 5 * 4);
}

TEST(LoopConfig, EntropyRejectedForRegression) {
  Rng rng(13);
  RegressionSpec spec;
  spec.samples = 120;
  const auto data = generate_regression(spec, rng);
  LoopConfig cfg = quick_config(StrategyId::kEntropy);
  cfg.trials = 1;
  EXPECT_THROW(run_experiment(data.train, data.test, cfg, quick_trainer()), Error);
}

TEST(AggregateCurve, PopulationStd) {
  const std::vector<std::vector<CycleRecord>> runs{{{0, 10, 0.5}, {1, 15, 0.7}},
                                                   {{0, 10, 0.7}, {1, 15, 0.7}}};
  const Curve c = aggregate_curve("x", runs);
  EXPECT_DOUBLE_EQ(c.points[0].mean, 0.6);
  EXPECT_NEAR(c.points[0].stddev, 0.1, 1e-15);
  EXPECT_EQ(c.points[1].stddev, 0.0);
  EXPECT_EQ(c.trials(), 2u);
  const std::vector<std::vector<CycleRecord>> ragged{{{0, 10, 0.5}}, {{0, 11, 0.5}}};
  EXPECT_THROW(aggregate_curve("x", ragged), Error);
}

}  // namespace
}  // namespace gcnal
