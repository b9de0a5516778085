#include "gcnal/alloop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "gcnal/error.hpp"

namespace gcnal {
namespace {

void notify(const PhaseObserver& observer, CyclePhase phase) {
  if (observer) observer(phase);
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.size() == 0) return b;
  Dataset out = a;
  out.inputs = vstack(a.inputs, b.inputs);
  if (a.task == TaskKind::kClassification) {
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  } else {
    out.targets = vstack(a.targets, b.targets);
  }
  return out;
}

}  // namespace

void PoolState::check_invariants(std::size_t pool_size) const {
  if (labelled.size() + unlabelled.size() != pool_size) {
    throw std::logic_error("pool state: |D_L| + |D_U| != N");
  }
  std::vector<bool> seen(pool_size, false);
  for (const auto* set : {&labelled, &unlabelled}) {
    for (std::size_t i : *set) {
      if (i >= pool_size || seen[i]) throw std::logic_error("pool state: index overlap");
      seen[i] = true;
    }
  }
  if (!std::includes(unlabelled.begin(), unlabelled.end(), subset.begin(), subset.end())) {
    throw std::logic_error("pool state: subset is not contained in D_U");
  }
}

Oracle::Oracle(Dataset truth) : truth_(std::move(truth)) {
  if (truth_.size() == 0) throw Error("oracle needs a non-empty pool");
  truth_.validate();
}

Dataset Oracle::annotate(std::span<const std::size_t> indices) {
  for (std::size_t i : indices) {
    if (i >= truth_.size()) throw Error("oracle: index " + std::to_string(i) + " outside pool");
  }
  annotations_ += indices.size();
  return truth_.subset(indices);
}

PoolState seed_pool(std::size_t pool_size, std::size_t seed_size, Rng& rng) {
  if (seed_size > pool_size) {
    throw Error("seed size " + std::to_string(seed_size) + " exceeds pool of " +
                std::to_string(pool_size));
  }
  PoolState s;
  s.labelled = rng.sample_without_replacement(pool_size, seed_size);
  std::vector<bool> taken(pool_size, false);
  for (std::size_t i : s.labelled) taken[i] = true;
  for (std::size_t i = 0; i < pool_size; ++i)
    if (!taken[i]) s.unlabelled.push_back(i);
  return s;
}

PoolState draw_subset(const PoolState& state, std::size_t subset_size, std::size_t budget,
                      Rng& rng) {
  if (subset_size < budget) throw Error("subset size must be at least the budget");
  if (state.unlabelled.size() < budget) {
    throw Error("budget exhausted: " + std::to_string(state.unlabelled.size()) +
                " unlabelled items left for a budget of " + std::to_string(budget));
  }
  PoolState next = state;
  const std::size_t k = std::min(subset_size, state.unlabelled.size());
  next.subset.clear();
  for (std::size_t pos : rng.sample_without_replacement(state.unlabelled.size(), k)) {
    next.subset.push_back(state.unlabelled[pos]);
  }
  std::sort(next.subset.begin(), next.subset.end());
  return next;
}

void LoopConfig::validate() const {
  if (seed_size == 0 || budget == 0 || subset_size == 0 || trials == 0) {
    throw Error("seed_size, budget, subset_size and trials must be positive");
  }
  if (budget > subset_size) throw Error("budget exceeds subset_size");
  if (!(margin >= 0.0 && margin <= 1.0)) throw Error("margin must lie in [0, 1]");
  gcn.validate();
}

const char* to_string(CyclePhase phase) {
  switch (phase) {
    case CyclePhase::kTrainLearner: return "train_learner";
    case CyclePhase::kExtractFeatures: return "extract_features";
    case CyclePhase::kBuildGraph: return "build_graph";
    case CyclePhase::kTrainGcn: return "train_gcn";
    case CyclePhase::kSelect: return "select";
    case CyclePhase::kAnnotate: return "annotate";
  }
  return "unknown";
}

CycleRecord run_cycle(TrialContext& ctx, Oracle& oracle, const Dataset& test,
                      const LoopConfig& config, const LearnerTrainer& trainer,
                      const TrialStreams& streams, const PhaseObserver& observer) {
  PoolState& state = ctx.state;
  const std::size_t cycle = state.cycle;
  if (state.subset.size() < config.budget) {
    throw Error("active subset smaller than the budget; draw a subset first");
  }

  notify(observer, CyclePhase::kTrainLearner);
  Rng learner_rng = streams.learner(cycle);
  const auto learner = trainer(ctx.annotated, learner_rng);
  const CycleRecord record{cycle, state.labelled.size(), learner->evaluate(test)};

  SelectionRequest req;
  req.labelled = state.labelled;
  req.candidates = state.subset;
  req.budget = config.budget;
  req.margin = config.margin;
  req.validate();

  SelectionResult picked;
  const Matrix& inputs = oracle.inputs();
  switch (config.strategy) {
    case StrategyId::kRandom: {
      notify(observer, CyclePhase::kSelect);
      Rng rng = streams.random_strategy(cycle);
      picked = select_random(req, rng);
      break;
    }
    case StrategyId::kEntropy: {
      if (learner->task() != TaskKind::kClassification) {
        throw Error("the entropy strategy needs a classification learner");
      }
      notify(observer, CyclePhase::kExtractFeatures);
      const Matrix posteriors = learner->predict_posterior(select_rows(inputs, req.candidates));
      notify(observer, CyclePhase::kSelect);
      picked = select_entropy(req, posteriors);
      break;
    }
    case StrategyId::kCoreset: {
      notify(observer, CyclePhase::kExtractFeatures);
      const Matrix lf = learner->extract_features(select_rows(inputs, req.labelled));
      const Matrix cf = learner->extract_features(select_rows(inputs, req.candidates));
      notify(observer, CyclePhase::kSelect);
      picked = select_coreset(req, lf, cf);
      break;
    }
    case StrategyId::kUncertainGcn:
    case StrategyId::kCoreGcn: {
      notify(observer, CyclePhase::kExtractFeatures);
      std::vector<std::size_t> node_to_pool = req.labelled;
      node_to_pool.insert(node_to_pool.end(), req.candidates.begin(), req.candidates.end());
      const GraphNodes nodes = node_init(
          learner->extract_features(select_rows(inputs, req.labelled)),
          learner->extract_features(select_rows(inputs, req.candidates)));

      notify(observer, CyclePhase::kBuildGraph);
      const Adjacency adj = build_adjacency(nodes.features, config.adjacency);

      notify(observer, CyclePhase::kTrainGcn);
      GcnTrainConfig gcfg = config.gcn;
      gcfg.seed = streams.gcn_seed(cycle);
      const GcnModel model = train_gcn(adj.a, nodes.features, nodes.labelled, gcfg);

      notify(observer, CyclePhase::kSelect);
      if (config.strategy == StrategyId::kUncertainGcn) {
        const auto scores = gcn_forward(model, adj.a, nodes.features).scores;
        picked = select_uncertain_gcn(req, scores, node_to_pool);
      } else {
        picked = select_core_gcn(req, model, adj.a, nodes.features, node_to_pool);
      }
      break;
    }
  }

  const std::unordered_set<std::size_t> candidates(req.candidates.begin(), req.candidates.end());
  std::unordered_set<std::size_t> unique(picked.chosen.begin(), picked.chosen.end());
  if (picked.chosen.size() != config.budget || unique.size() != config.budget) {
    throw std::logic_error("selection did not return budget-many unique indices");
  }
  for (std::size_t i : picked.chosen) {
    if (!candidates.contains(i)) {
      throw std::logic_error("selection returned index " + std::to_string(i) +
                             " outside the unlabelled subset");
    }
  }

  notify(observer, CyclePhase::kAnnotate);
  ctx.annotated = concat(ctx.annotated, oracle.annotate(picked.chosen));
  state.labelled.insert(state.labelled.end(), picked.chosen.begin(), picked.chosen.end());
  std::erase_if(state.unlabelled, [&](std::size_t i) { return unique.contains(i); });
  state.subset.clear();
  state.cycle += 1;
  state.check_invariants(oracle.pool_size());
  return record;
}

std::vector<CycleRecord> run_trial(const Dataset& pool, const Dataset& test,
                                   const LoopConfig& config, const LearnerTrainer& trainer,
                                   std::size_t trial, const PhaseObserver& observer) {
  config.validate();
  const TrialStreams streams(Rng::trial_seed(config.base_seed, trial));
  Oracle oracle(pool);

  TrialContext ctx;
  Rng seed_rng = streams.seed_pool();
  ctx.state = seed_pool(oracle.pool_size(), config.seed_size, seed_rng);
  ctx.annotated = oracle.annotate(ctx.state.labelled);
  if (config.cycles > 0 && ctx.state.unlabelled.empty()) {
    throw Error("no unlabelled items left after seeding");
  }

  std::vector<CycleRecord> records;
  for (std::size_t c = 0; c < config.cycles; ++c) {
    Rng subset_rng = streams.subset(c);
    ctx.state = draw_subset(ctx.state, config.subset_size, config.budget, subset_rng);
    records.push_back(run_cycle(ctx, oracle, test, config, trainer, streams, observer));
  }

  notify(observer, CyclePhase::kTrainLearner);
  Rng final_rng = streams.learner(config.cycles);
  const auto learner = trainer(ctx.annotated, final_rng);
  records.push_back({config.cycles, ctx.state.labelled.size(), learner->evaluate(test)});
  return records;
}

Curve aggregate_curve(std::string label, const std::vector<std::vector<CycleRecord>>& per_trial) {
  if (per_trial.empty()) throw Error("aggregate_curve: no trials");
  const std::size_t stages = per_trial.front().size();
  Curve curve;
  curve.label = std::move(label);
  for (std::size_t s = 0; s < stages; ++s) {
    CurvePoint p;
    p.cycle = per_trial.front()[s].cycle;
    p.labelled = per_trial.front()[s].labelled;
    for (const auto& records : per_trial) {
      if (records.size() != stages || records[s].cycle != p.cycle ||
          records[s].labelled != p.labelled) {
        throw Error("aggregate_curve: trials disagree on stage layout");
      }
      p.trials.push_back(records[s].metric);
    }
    double sum = 0.0;
    for (double m : p.trials) sum += m;
    p.mean = sum / static_cast<double>(p.trials.size());
    double var = 0.0;
    for (double m : p.trials) var += (m - p.mean) * (m - p.mean);
    p.stddev = std::sqrt(var / static_cast<double>(p.trials.size()));
    curve.points.push_back(std::move(p));
  }
  return curve;
}

Curve run_experiment(const Dataset& pool, const Dataset& test, const LoopConfig& config,
                     const LearnerTrainer& trainer) {
  config.validate();
  std::vector<std::vector<CycleRecord>> per_trial(config.trials);
  if (config.parallel_trials && config.trials > 1) {
    std::vector<std::exception_ptr> errors(config.trials);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < config.trials; ++t) {
      workers.emplace_back([&, t] {
        try {
          per_trial[t] = run_trial(pool, test, config, trainer, t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t t = 0; t < config.trials; ++t) {
      per_trial[t] = run_trial(pool, test, config, trainer, t);
    }
  }
  return aggregate_curve(to_string(config.strategy), per_trial);
}

}  // namespace gcnal
