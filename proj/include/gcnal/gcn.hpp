#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gcnal/numerics.hpp"
#include "gcnal/rng.hpp"

namespace gcnal {

/// Graph convolutional binary classifier separating labelled from unlabelled
/// nodes. Layer k maps H_k to A·H_k·Θ_k; hidden layers use ReLU and the last
/// layer (width 1) a sigmoid, so with two layers
///
///   scores = σ(A · ReLU(A · X · Θ1) · Θ2).
///
/// No biases. Widths are m → h → … → h → 1.
struct GcnModel {
  std::vector<Matrix> weights;
  double dropout = 0.3;
  std::vector<AdamState> optimizer;

  // Glorot-uniform weights, zeroed optimizer state.
  static GcnModel initialize(std::size_t input_width, std::size_t hidden_width,
                             std::size_t layers, double dropout, Rng& rng);

  std::size_t layers() const noexcept { return weights.size(); }
  std::size_t input_width() const noexcept { return weights.front().rows(); }
  std::size_t hidden_width() const noexcept { return weights.front().cols(); }
};

struct GcnTrainConfig {
  std::size_t epochs = 200;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  double lambda = 1.2;
  double dropout = 0.3;
  std::size_t layers = 2;
  // 0 selects min(512, 4·m).
  std::size_t hidden_width = 0;
  std::uint64_t seed = 0;

  std::size_t resolved_hidden_width(std::size_t input_width) const;
  void validate() const;
};

// One N x h keep-mask per hidden layer, entries 0 or 1/(1 − rate). Empty when
// dropout is off.
using DropoutMasks = std::vector<Matrix>;

struct GcnForward {
  Matrix hidden;               // first-layer output H1 before dropout
  std::vector<double> scores;  // one per node, in (0, 1)
  DropoutMasks masks;          // masks drawn for this pass
};

/// Inference when dropout_rng is null; otherwise fresh inverted-dropout masks
/// are drawn for every hidden layer.
GcnForward gcn_forward(const GcnModel& model, const Matrix& adjacency, const Matrix& features,
                       Rng* dropout_rng = nullptr);
// Forward pass with caller-supplied masks.
GcnForward gcn_forward_masked(const GcnModel& model, const Matrix& adjacency,
                              const Matrix& features, const DropoutMasks& masks);

/// λ-weighted binary cross-entropy: mean −log s over labelled nodes plus λ
/// times mean −log(1 − s) over unlabelled nodes. Scores are clamped to
/// [1e-12, 1 − 1e-12]. Both node groups must be non-empty.
double gcn_loss(std::span<const double> scores, const std::vector<bool>& labelled, double lambda);

/// Exact gradients of gcn_loss∘gcn_forward_masked, one per weight matrix.
std::vector<Matrix> gcn_backward(const GcnModel& model, const Matrix& adjacency,
                                 const Matrix& features, const std::vector<bool>& labelled,
                                 double lambda, const DropoutMasks& masks = {});

/// Full-batch Adam for config.epochs steps with a fresh dropout mask per step.
GcnModel train_gcn(const Matrix& adjacency, const Matrix& features,
                   const std::vector<bool>& labelled, const GcnTrainConfig& config);

/// Node embeddings after the first layer in inference mode. A single-layer
/// model has no hidden layer and returns the propagated input A·X.
Matrix gcn_hidden(const GcnModel& model, const Matrix& adjacency, const Matrix& features);

}  // namespace gcnal
