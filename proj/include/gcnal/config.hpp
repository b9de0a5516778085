#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "gcnal/alloop.hpp"
#include "gcnal/datasets.hpp"
#include "gcnal/learner.hpp"

namespace gcnal {

/// Every knob of one experiment. Read from a flat `key = value` file where
/// `#` starts a comment; unknown or repeated keys are rejected.
struct ExperimentConfig {
  std::string dataset = "blobs:classes=10,per_class=250,dim=32,spread=1,noise=1.5";
  std::optional<TaskKind> task;  // inferred from the dataset when unset
  StrategyId strategy = StrategyId::kUncertainGcn;
  std::size_t seed_size = 100;
  std::size_t budget = 100;
  std::size_t cycles = 5;
  std::size_t subset_size = 1000;
  std::size_t trials = 5;
  std::uint64_t base_seed = 0;

  std::size_t learner_epochs = 100;
  std::optional<double> learner_lr;  // 0.1 (SGD) for classification, 1e-3 (Adam) for regression
  double learner_momentum = 0.9;
  double learner_wd = 5e-4;
  std::size_t learner_hidden = 32;
  std::size_t learner_batch_size = 32;

  std::size_t gcn_hidden = 0;  // 0: min(512, 4·learner_hidden)
  double gcn_dropout = 0.3;
  double gcn_lambda = 1.2;
  double gcn_margin = 0.1;
  std::size_t gcn_epochs = 200;
  std::size_t gcn_layers = 2;
  AdjacencyMode adjacency = AdjacencyMode::kSimilarity;

  bool parallel_trials = false;

  // Assigns one key from its textual value; throws on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  void validate() const;

  TrainSchedule learner_schedule(TaskKind task) const;
  LearnerOptions learner_options() const;
  LoopConfig loop_config() const;
};

ExperimentConfig parse_config(std::string_view text, std::string_view origin = "config");
// Applies GCNAL_SEED from the environment when present.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Dataset, resolved task, and trainer for a validated config.
struct PreparedExperiment {
  DatasetSplit data;
  TaskKind task = TaskKind::kClassification;
  LoopConfig loop;
  LearnerTrainer trainer;
};

PreparedExperiment prepare_experiment(const ExperimentConfig& config);

}  // namespace gcnal
