#include "gcnal/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "gcnal/error.hpp"

namespace gcnal {
namespace {

void check_budget(const SelectionRequest& req) {
  if (req.budget > req.candidates.size()) {
    throw Error("budget " + std::to_string(req.budget) + " exceeds " +
                std::to_string(req.candidates.size()) + " candidates");
  }
}

std::unordered_map<std::size_t, std::size_t> node_of_pool(std::span<const std::size_t> node_to_pool) {
  std::unordered_map<std::size_t, std::size_t> m;
  m.reserve(node_to_pool.size());
  for (std::size_t node = 0; node < node_to_pool.size(); ++node) m.emplace(node_to_pool[node], node);
  return m;
}

}  // namespace

const char* to_string(StrategyId id) {
  switch (id) {
    case StrategyId::kRandom: return "random";
    case StrategyId::kEntropy: return "entropy";
    case StrategyId::kCoreset: return "coreset";
    case StrategyId::kUncertainGcn: return "uncertain_gcn";
    case StrategyId::kCoreGcn: return "core_gcn";
  }
  return "random";
}

std::optional<StrategyId> parse_strategy(std::string_view text) {
  for (auto id : {StrategyId::kRandom, StrategyId::kEntropy, StrategyId::kCoreset,
                  StrategyId::kUncertainGcn, StrategyId::kCoreGcn}) {
    if (text == to_string(id)) return id;
  }
  return std::nullopt;
}

bool uses_gcn(StrategyId id) {
  return id == StrategyId::kUncertainGcn || id == StrategyId::kCoreGcn;
}

void SelectionRequest::validate() const {
  if (budget == 0) throw Error("selection budget must be at least 1");
  check_budget(*this);
  std::unordered_set<std::size_t> seen(labelled.begin(), labelled.end());
  if (seen.size() != labelled.size()) throw Error("duplicate labelled index");
  for (std::size_t c : candidates) {
    if (!seen.insert(c).second) {
      throw Error("candidate " + std::to_string(c) + " is duplicated or already labelled");
    }
  }
}

std::vector<std::size_t> top_by_descending(std::span<const double> values,
                                           std::span<const std::size_t> ids, std::size_t count) {
  if (values.size() != ids.size()) throw Error("top_by_descending: length mismatch");
  if (count > ids.size()) throw Error("top_by_descending: count exceeds items");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return ids[a] < ids[b];
  });
  order.resize(count);
  return order;
}

SelectionResult select_random(const SelectionRequest& req, Rng& rng) {
  check_budget(req);
  SelectionResult r;
  for (std::size_t pos : rng.sample_without_replacement(req.candidates.size(), req.budget)) {
    r.chosen.push_back(req.candidates[pos]);
    r.scores.push_back(0.0);
  }
  return r;
}

KCenterPicks kcenter_greedy(const Matrix& anchors, const Matrix& candidates, std::size_t budget) {
  if (anchors.rows() == 0) throw Error("kcenter_greedy: needs at least one anchor");
  if (budget > candidates.rows()) {
    throw Error("kcenter_greedy: budget " + std::to_string(budget) + " exceeds " +
                std::to_string(candidates.rows()) + " candidates");
  }
  KCenterPicks picks;
  if (budget == 0) return picks;

  // Running squared distance from each candidate to its nearest centre.
  const Matrix d0 = pairwise_sqdist(candidates, anchors);
  std::vector<double> nearest(candidates.rows());
  for (std::size_t i = 0; i < candidates.rows(); ++i) {
    const auto r = d0.row(i);
    nearest[i] = *std::min_element(r.begin(), r.end());
  }
  std::vector<bool> taken(candidates.rows(), false);

  for (std::size_t step = 0; step < budget; ++step) {
    std::size_t best = candidates.rows();
    for (std::size_t i = 0; i < candidates.rows(); ++i) {
      if (taken[i]) continue;
      if (best == candidates.rows() || nearest[i] > nearest[best]) best = i;
    }
    taken[best] = true;
    picks.positions.push_back(best);
    picks.distances.push_back(std::sqrt(nearest[best]));

    const auto centre = candidates.row(best);
    for (std::size_t i = 0; i < candidates.rows(); ++i) {
      if (taken[i]) continue;
      const auto r = candidates.row(i);
      double s = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) {
        const double diff = r[k] - centre[k];
        s += diff * diff;
      }
      nearest[i] = std::min(nearest[i], s);
    }
  }
  return picks;
}

SelectionResult select_coreset(const SelectionRequest& req, const Matrix& labelled_features,
                               const Matrix& candidate_features) {
  check_budget(req);
  if (labelled_features.rows() != req.labelled.size() ||
      candidate_features.rows() != req.candidates.size()) {
    throw Error("select_coreset: feature rows are not aligned with the request");
  }
  const KCenterPicks picks = kcenter_greedy(labelled_features, candidate_features, req.budget);
  SelectionResult r;
  for (std::size_t k = 0; k < picks.positions.size(); ++k) {
    r.chosen.push_back(req.candidates[picks.positions[k]]);
    r.scores.push_back(picks.distances[k]);
  }
  return r;
}

SelectionResult select_uncertain_gcn(const SelectionRequest& req, std::span<const double> scores,
                                     std::span<const std::size_t> node_to_pool) {
  check_budget(req);
  if (scores.size() != node_to_pool.size()) {
    throw Error("select_uncertain_gcn: scores and node map differ in length");
  }
  const auto node = node_of_pool(node_to_pool);
  std::vector<double> distance;
  distance.reserve(req.candidates.size());
  for (std::size_t c : req.candidates) {
    const auto it = node.find(c);
    if (it == node.end()) throw Error("candidate " + std::to_string(c) + " is not a graph node");
    const double s = scores[it->second];
    if (!(s >= 0.0 && s <= 1.0)) throw Error("GCN score outside [0, 1]");
    distance.push_back(std::abs(req.margin - s));
  }
  SelectionResult r;
  for (std::size_t k : top_by_descending(distance, req.candidates, req.budget)) {
    r.chosen.push_back(req.candidates[k]);
    r.scores.push_back(distance[k]);
  }
  return r;
}

SelectionResult select_core_gcn(const SelectionRequest& req, const GcnModel& model,
                                const Matrix& adjacency, const Matrix& node_features,
                                std::span<const std::size_t> node_to_pool) {
  check_budget(req);
  if (node_to_pool.size() != node_features.rows()) {
    throw Error("select_core_gcn: node map does not match node count");
  }
  const Matrix hidden = gcn_hidden(model, adjacency, node_features);
  const auto node = node_of_pool(node_to_pool);
  auto rows_for = [&](const std::vector<std::size_t>& pool) {
    std::vector<std::size_t> rows;
    rows.reserve(pool.size());
    for (std::size_t p : pool) {
      const auto it = node.find(p);
      if (it == node.end()) throw Error("pool index " + std::to_string(p) + " is not a graph node");
      rows.push_back(it->second);
    }
    return rows;
  };
  const auto anchor_rows = rows_for(req.labelled);
  const auto candidate_rows = rows_for(req.candidates);
  const KCenterPicks picks = kcenter_greedy(select_rows(hidden, anchor_rows),
                                            select_rows(hidden, candidate_rows), req.budget);
  SelectionResult r;
  for (std::size_t k = 0; k < picks.positions.size(); ++k) {
    r.chosen.push_back(req.candidates[picks.positions[k]]);
    r.scores.push_back(picks.distances[k]);
  }
  return r;
}

double entropy(std::span<const double> distribution) {
  double h = 0.0;
  for (double p : distribution)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

SelectionResult select_entropy(const SelectionRequest& req, const Matrix& posteriors) {
  check_budget(req);
  if (posteriors.rows() != req.candidates.size()) {
    throw Error("select_entropy: posterior rows are not aligned with the candidates");
  }
  std::vector<double> h(posteriors.rows());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = entropy(posteriors.row(i));
  SelectionResult r;
  for (std::size_t k : top_by_descending(h, req.candidates, req.budget)) {
    r.chosen.push_back(req.candidates[k]);
    r.scores.push_back(h[k]);
  }
  return r;
}

}  // namespace gcnal
