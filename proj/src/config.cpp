#include "gcnal/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "gcnal/error.hpp"

namespace gcnal {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error("config key '" + std::string(key) + "': expected a non-negative integer, got '" +
                std::string(value) + "'");
  }
  return v;
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(v)) {
    throw Error("config key '" + std::string(key) + "': expected a number, got '" +
                std::string(value) + "'");
  }
  return v;
}

TaskKind infer_task(const DatasetSource& src, const DatasetSplit* data) {
  switch (src.kind) {
    case DatasetSource::Kind::kBlobs: return TaskKind::kClassification;
    case DatasetSource::Kind::kRegression: return TaskKind::kRegression;
    case DatasetSource::Kind::kCsv: break;
  }
  return data ? data->train.task : TaskKind::kClassification;
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  auto count = [&] { return static_cast<std::size_t>(to_u64(key, value)); };
  auto real = [&] { return to_double(key, value); };

  if (key == "dataset") {
    if (value.empty()) throw Error("config key 'dataset' is empty");
    dataset = value;
  } else if (key == "task") {
    if (value == "classification") task = TaskKind::kClassification;
    else if (value == "regression") task = TaskKind::kRegression;
    else throw Error("config key 'task': expected classification or regression, got '" + value + "'");
  } else if (key == "strategy") {
    const auto id = parse_strategy(value);
    if (!id) throw Error("config key 'strategy': unknown strategy '" + value + "'");
    strategy = *id;
  } else if (key == "seed_size") {
    seed_size = count();
  } else if (key == "budget") {
    budget = count();
  } else if (key == "cycles") {
    cycles = count();
  } else if (key == "subset_size") {
    subset_size = count();
  } else if (key == "trials") {
    trials = count();
  } else if (key == "base_seed") {
    base_seed = to_u64(key, value);
  } else if (key == "learner_epochs") {
    learner_epochs = count();
  } else if (key == "learner_lr") {
    learner_lr = real();
  } else if (key == "learner_momentum") {
    learner_momentum = real();
  } else if (key == "learner_wd") {
    learner_wd = real();
  } else if (key == "learner_hidden") {
    learner_hidden = count();
  } else if (key == "learner_batch_size") {
    learner_batch_size = count();
  } else if (key == "gcn_hidden") {
    gcn_hidden = count();
  } else if (key == "gcn_dropout") {
    gcn_dropout = real();
  } else if (key == "gcn_lambda") {
    gcn_lambda = real();
  } else if (key == "gcn_margin") {
    gcn_margin = real();
  } else if (key == "gcn_epochs") {
    gcn_epochs = count();
  } else if (key == "gcn_layers") {
    gcn_layers = count();
  } else if (key == "adjacency") {
    const auto mode = parse_adjacency_mode(value);
    if (!mode) throw Error("config key 'adjacency': expected similarity, identity or ones");
    adjacency = *mode;
  } else {
    throw Error("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw Error(std::string("config key '") + name + "' must be positive");
  };
  positive(seed_size, "seed_size");
  positive(budget, "budget");
  positive(subset_size, "subset_size");
  positive(trials, "trials");
  positive(learner_epochs, "learner_epochs");
  positive(learner_hidden, "learner_hidden");
  positive(learner_batch_size, "learner_batch_size");
  positive(gcn_epochs, "gcn_epochs");
  if (budget > subset_size) throw Error("budget must not exceed subset_size");
  if (!(gcn_lambda > 0.0)) throw Error("gcn_lambda must be positive");
  if (!(gcn_dropout >= 0.0 && gcn_dropout < 1.0)) throw Error("gcn_dropout must lie in [0, 1)");
  if (!(gcn_margin >= 0.0 && gcn_margin <= 1.0)) throw Error("gcn_margin must lie in [0, 1]");
  if (gcn_layers < 1 || gcn_layers > 3) throw Error("gcn_layers must be 1, 2 or 3");
  if (learner_lr && !(*learner_lr > 0.0)) throw Error("learner_lr must be positive");
  if (learner_momentum < 0.0 || learner_wd < 0.0) {
    throw Error("learner_momentum and learner_wd must be non-negative");
  }
  const auto src = DatasetSource::parse(dataset);
  if (task && src.kind != DatasetSource::Kind::kCsv && *task != infer_task(src, nullptr)) {
    throw Error(std::string("task '") + to_string(*task) + "' does not match dataset generator");
  }
  std::optional<TaskKind> effective = task;
  if (!effective && src.kind != DatasetSource::Kind::kCsv) effective = infer_task(src, nullptr);
  if (effective == TaskKind::kRegression && strategy == StrategyId::kEntropy) {
    throw Error("the entropy strategy needs a classification task");
  }
}

TrainSchedule ExperimentConfig::learner_schedule(TaskKind kind) const {
  TrainSchedule s = kind == TaskKind::kClassification ? TrainSchedule::classification_default()
                                                      : TrainSchedule::regression_default();
  s.epochs = learner_epochs;
  s.batch_size = learner_batch_size;
  if (learner_lr) s.lr = *learner_lr;
  s.momentum = learner_momentum;
  s.weight_decay = learner_wd;
  // Decay at 80% of training, as 160 of 200 epochs.
  s.lr_decay_epoch = learner_epochs * 4 / 5;
  return s;
}

LearnerOptions ExperimentConfig::learner_options() const {
  LearnerOptions o;
  o.hidden_width = learner_hidden;
  return o;
}

LoopConfig ExperimentConfig::loop_config() const {
  LoopConfig c;
  c.strategy = strategy;
  c.seed_size = seed_size;
  c.budget = budget;
  c.cycles = cycles;
  c.subset_size = subset_size;
  c.trials = trials;
  c.base_seed = base_seed;
  c.margin = gcn_margin;
  c.adjacency = adjacency;
  c.gcn.epochs = gcn_epochs;
  c.gcn.lambda = gcn_lambda;
  c.gcn.dropout = gcn_dropout;
  c.gcn.layers = gcn_layers;
  c.gcn.hidden_width = gcn_hidden;
  c.parallel_trials = parallel_trials;
  return c;
}

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(lineno);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw Error(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (!seen.insert(key).second) throw Error(where + ": duplicate key '" + key + "'");
    try {
      cfg.set(key, body.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str(), path.string());
  if (const char* env = std::getenv("GCNAL_SEED"); env != nullptr && *env != '\0') {
    cfg.base_seed = to_u64("GCNAL_SEED", trim(env));
  }
  return cfg;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto src = DatasetSource::parse(config.dataset);
  PreparedExperiment p;
  Rng data_rng = Rng(config.base_seed).derive("data");
  p.data = src.materialize(data_rng);
  p.task = infer_task(src, &p.data);
  if (config.task && *config.task != p.task) {
    throw Error(std::string("task '") + to_string(*config.task) + "' does not match the " +
                to_string(p.task) + " dataset");
  }
  if (p.task == TaskKind::kRegression && config.strategy == StrategyId::kEntropy) {
    throw Error("the entropy strategy needs a classification task");
  }
  p.loop = config.loop_config();
  p.trainer = make_mlp_trainer(config.learner_schedule(p.task), config.learner_options());
  return p;
}

}  // namespace gcnal
