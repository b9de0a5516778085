#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gcnal/gcn.hpp"
#include "gcnal/graph.hpp"
#include "gcnal/numerics.hpp"
#include "gcnal/rng.hpp"

namespace gcnal {

enum class StrategyId { kRandom, kEntropy, kCoreset, kUncertainGcn, kCoreGcn };

const char* to_string(StrategyId id);
std::optional<StrategyId> parse_strategy(std::string_view text);
// True for the strategies that build a graph and train a GCN each cycle.
bool uses_gcn(StrategyId id);

struct SelectionRequest {
  std::vector<std::size_t> labelled;    // pool indices already annotated
  std::vector<std::size_t> candidates;  // pool indices eligible this cycle
  std::size_t budget = 0;
  double margin = 0.1;

  // 1 ≤ budget ≤ |candidates|, candidates unique and disjoint from labelled.
  void validate() const;
};

struct SelectionResult {
  std::vector<std::size_t> chosen;  // pool indices in pick order
  std::vector<double> scores;       // per-pick diagnostic
};

/// Top `count` ids ordered by descending value, ties to the lower id.
std::vector<std::size_t> top_by_descending(std::span<const double> values,
                                           std::span<const std::size_t> ids, std::size_t count);

SelectionResult select_random(const SelectionRequest& req, Rng& rng);

struct KCenterPicks {
  std::vector<std::size_t> positions;  // candidate rows in pick order
  std::vector<double> distances;       // Euclidean min-distance at pick time
};

/// Greedy farthest-first traversal: each step takes the candidate whose
/// distance to the nearest anchor or earlier pick is largest, ties to the
/// lowest candidate position.
KCenterPicks kcenter_greedy(const Matrix& anchors, const Matrix& candidates, std::size_t budget);

// Feature rows are aligned with req.labelled and req.candidates.
SelectionResult select_coreset(const SelectionRequest& req, const Matrix& labelled_features,
                               const Matrix& candidate_features);

/// Ranks candidate nodes by |margin − score| in descending order.
/// node_to_pool maps each graph node to its pool index.
SelectionResult select_uncertain_gcn(const SelectionRequest& req, std::span<const double> scores,
                                     std::span<const std::size_t> node_to_pool);

/// k-Center greedy on the GCN's first-layer embeddings with labelled nodes
/// as anchors.
SelectionResult select_core_gcn(const SelectionRequest& req, const GcnModel& model,
                                const Matrix& adjacency, const Matrix& node_features,
                                std::span<const std::size_t> node_to_pool);

double entropy(std::span<const double> distribution);

// Posterior rows are aligned with req.candidates.
SelectionResult select_entropy(const SelectionRequest& req, const Matrix& posteriors);

}  // namespace gcnal
