#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gcnal/gcn.hpp"
#include "gcnal/graph.hpp"
#include "gcnal/learner.hpp"
#include "gcnal/rng.hpp"
#include "gcnal/strategies.hpp"

namespace gcnal {

/// Index bookkeeping for one trial. `labelled` keeps annotation order;
/// `unlabelled` and `subset` are sorted ascending.
struct PoolState {
  std::vector<std::size_t> labelled;
  std::vector<std::size_t> unlabelled;
  std::vector<std::size_t> subset;
  std::size_t cycle = 0;

  // Throws std::logic_error on overlap, loss of indices, or subset ⊄ unlabelled.
  void check_invariants(std::size_t pool_size) const;
};

/// Holds the ground truth for the whole pool. The loop only learns a target by
/// asking for it here.
class Oracle {
 public:
  explicit Oracle(Dataset truth);

  std::size_t pool_size() const noexcept { return truth_.size(); }
  TaskKind task() const noexcept { return truth_.task; }
  // Inputs are observable for every pool item; targets are not.
  const Matrix& inputs() const noexcept { return truth_.inputs; }

  Dataset annotate(std::span<const std::size_t> indices);
  std::size_t annotations() const noexcept { return annotations_; }

 private:
  Dataset truth_;
  std::size_t annotations_ = 0;
};

PoolState seed_pool(std::size_t pool_size, std::size_t seed_size, Rng& rng);

/// Replaces the active subset with a uniform draw of min(subset_size, |D_U|)
/// unlabelled indices.
PoolState draw_subset(const PoolState& state, std::size_t subset_size, std::size_t budget,
                      Rng& rng);

struct LoopConfig {
  StrategyId strategy = StrategyId::kUncertainGcn;
  std::size_t seed_size = 100;
  std::size_t budget = 100;
  std::size_t cycles = 5;
  std::size_t subset_size = 1000;
  std::size_t trials = 5;
  std::uint64_t base_seed = 0;
  double margin = 0.1;
  AdjacencyMode adjacency = AdjacencyMode::kSimilarity;
  // The seed field is replaced by a per-cycle stream for every training.
  GcnTrainConfig gcn;
  bool parallel_trials = false;

  void validate() const;
};

/// Named random streams for one trial. Each purpose draws from its own
/// stream, so two strategies under the same trial seed see the same seed pool
/// and the same subset draws.
class TrialStreams {
 public:
  explicit TrialStreams(std::uint64_t trial_seed) : root_(trial_seed) {}

  Rng seed_pool() const { return root_.derive("seed_pool"); }
  Rng subset(std::size_t cycle) const { return root_.derive("subset", cycle); }
  Rng learner(std::size_t cycle) const { return root_.derive("learner", cycle); }
  std::uint64_t gcn_seed(std::size_t cycle) const { return root_.derive("gcn", cycle).seed(); }
  Rng random_strategy(std::size_t cycle) const { return root_.derive("random", cycle); }

 private:
  Rng root_;
};

enum class CyclePhase { kTrainLearner, kExtractFeatures, kBuildGraph, kTrainGcn, kSelect, kAnnotate };

const char* to_string(CyclePhase phase);

using PhaseObserver = std::function<void(CyclePhase)>;

struct CycleRecord {
  std::size_t cycle = 0;
  std::size_t labelled = 0;
  double metric = 0.0;
};

/// Labelled examples gathered from the oracle, in annotation order.
struct TrialContext {
  PoolState state;
  Dataset annotated;
};

/// One pass of the loop on the current labelled set: train the learner,
/// extract features for D_L ∪ D_S, build the graph and train the GCN when the
/// strategy needs them, select `budget` indices, annotate them, and record the
/// test metric of the learner trained at the start of this cycle.
CycleRecord run_cycle(TrialContext& ctx, Oracle& oracle, const Dataset& test,
                      const LoopConfig& config, const LearnerTrainer& trainer,
                      const TrialStreams& streams, const PhaseObserver& observer = {});

/// Seeds the pool, runs config.cycles cycles, then trains once more on the
/// final labelled set. Returns cycles + 1 records.
std::vector<CycleRecord> run_trial(const Dataset& pool, const Dataset& test,
                                   const LoopConfig& config, const LearnerTrainer& trainer,
                                   std::size_t trial, const PhaseObserver& observer = {});

struct CurvePoint {
  std::size_t cycle = 0;
  std::size_t labelled = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation across trials
  std::vector<double> trials;
};

struct Curve {
  std::string label;
  std::vector<CurvePoint> points;

  std::size_t trials() const { return points.empty() ? 0 : points.front().trials.size(); }
};

// Per-trial record lists must share cycles and labelled counts.
Curve aggregate_curve(std::string label, const std::vector<std::vector<CycleRecord>>& per_trial);

/// All trials of one strategy, trial t seeded with base_seed + t.
Curve run_experiment(const Dataset& pool, const Dataset& test, const LoopConfig& config,
                     const LearnerTrainer& trainer);

}  // namespace gcnal
