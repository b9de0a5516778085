#include "gcnal/gcn.hpp"

#include <algorithm>
#include <cmath>

#include "gcnal/error.hpp"

namespace gcnal {
namespace {

constexpr double kScoreClamp = 1e-12;

struct Trace {
  Matrix ax;                  // A·X, the first layer's propagated input
  std::vector<Matrix> pre;    // pre-activation per hidden layer
  std::vector<Matrix> input;  // input to layer k (post-dropout for k > 0)
  Matrix logits;              // N x 1
};

void check_shapes(const GcnModel& model, const Matrix& adjacency, const Matrix& features) {
  if (model.weights.empty()) throw Error("gcn: model has no layers");
  const std::size_t n = features.rows();
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw Error("gcn: adjacency " + shape_string(adjacency) + " does not match " +
                std::to_string(n) + " nodes");
  }
  if (features.cols() != model.input_width()) {
    throw Error("gcn: feature width " + std::to_string(features.cols()) + " != model width " +
                std::to_string(model.input_width()));
  }
}

Trace run_forward(const GcnModel& model, const Matrix& adjacency, Matrix ax,
                  const DropoutMasks& masks) {
  const std::size_t hidden_layers = model.layers() - 1;
  if (!masks.empty() && masks.size() != hidden_layers) {
    throw Error("gcn: expected " + std::to_string(hidden_layers) + " dropout masks");
  }
  Trace t;
  t.ax = std::move(ax);
  Matrix z = matmul(t.ax, model.weights[0]);
  for (std::size_t k = 0; k < hidden_layers; ++k) {
    t.pre.push_back(z);
    Matrix h = relu(z);
    if (!masks.empty()) {
      if (!masks[k].same_shape(h)) throw Error("gcn: dropout mask shape mismatch");
      for (std::size_t i = 0; i < h.size(); ++i) h.values()[i] *= masks[k].values()[i];
    }
    t.input.push_back(h);
    z = matmul(adjacency, matmul(h, model.weights[k + 1]));
  }
  t.logits = std::move(z);
  return t;
}

std::vector<double> scores_of(const Matrix& logits) {
  std::vector<double> s(logits.rows());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = sigmoid(logits(i, 0));
  return s;
}

DropoutMasks draw_masks(const GcnModel& model, std::size_t nodes, Rng& rng) {
  DropoutMasks masks;
  if (model.dropout <= 0.0) return masks;
  const double keep = 1.0 - model.dropout;
  for (std::size_t k = 0; k + 1 < model.layers(); ++k) {
    Matrix m(nodes, model.weights[k].cols());
    for (double& x : m.values()) x = rng.uniform() < keep ? 1.0 / keep : 0.0;
    masks.push_back(std::move(m));
  }
  return masks;
}

void check_groups(const std::vector<bool>& labelled, std::size_t n) {
  if (labelled.size() != n) throw Error("gcn: labelled mask length does not match node count");
  const auto nl = static_cast<std::size_t>(std::count(labelled.begin(), labelled.end(), true));
  if (nl == 0 || nl == n) {
    throw Error("gcn loss needs both labelled and unlabelled nodes");
  }
}

std::vector<Matrix> backward(const GcnModel& model, const Matrix& adjacency, const Trace& t,
                             const std::vector<bool>& labelled, double lambda,
                             const DropoutMasks& masks) {
  const std::size_t n = t.logits.rows();
  check_groups(labelled, n);
  const auto nl = static_cast<double>(std::count(labelled.begin(), labelled.end(), true));
  const double nu = static_cast<double>(n) - nl;

  // d loss / d logit for σ-BCE: labelled −(1 − s)/N_l, unlabelled λ·s/N_u.
  // A clamped score makes the loss flat in that node's logit.
  Matrix dz(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sigmoid(t.logits(i, 0));
    if (s < kScoreClamp || s > 1.0 - kScoreClamp) continue;
    dz(i, 0) = labelled[i] ? -(1.0 - s) / nl : lambda * s / nu;
  }

  std::vector<Matrix> grads(model.layers());
  for (std::size_t k = model.layers(); k-- > 1;) {
    const Matrix dp = matmul_tn(adjacency, dz);
    grads[k] = matmul_tn(t.input[k - 1], dp);
    Matrix dh = matmul_nt(dp, model.weights[k]);
    const Matrix& pre = t.pre[k - 1];
    for (std::size_t i = 0; i < dh.size(); ++i) {
      double g = dh.values()[i];
      if (!masks.empty()) g *= masks[k - 1].values()[i];
      dh.values()[i] = pre.values()[i] > 0.0 ? g : 0.0;
    }
    dz = std::move(dh);
  }
  grads[0] = matmul_tn(t.ax, dz);
  return grads;
}

}  // namespace

GcnModel GcnModel::initialize(std::size_t input_width, std::size_t hidden_width,
                              std::size_t layers, double dropout, Rng& rng) {
  if (input_width == 0 || hidden_width == 0) throw Error("gcn widths must be positive");
  if (layers == 0) throw Error("gcn needs at least one layer");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error("gcn dropout must lie in [0, 1)");
  GcnModel model;
  model.dropout = dropout;
  std::size_t in = input_width;
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t out = k + 1 == layers ? 1 : hidden_width;
    Matrix w(in, out);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& x : w.values()) x = rng.uniform(-bound, bound);
    model.optimizer.push_back(AdamState::like(w));
    model.weights.push_back(std::move(w));
    in = out;
  }
  return model;
}

std::size_t GcnTrainConfig::resolved_hidden_width(std::size_t input_width) const {
  return hidden_width > 0 ? hidden_width : std::min<std::size_t>(512, 4 * input_width);
}

void GcnTrainConfig::validate() const {
  if (!(lambda > 0.0)) throw Error("gcn lambda must be positive");
  if (!(lr > 0.0)) throw Error("gcn learning rate must be positive");
  if (weight_decay < 0.0) throw Error("gcn weight decay must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error("gcn dropout must lie in [0, 1)");
  if (layers == 0) throw Error("gcn needs at least one layer");
}

GcnForward gcn_forward_masked(const GcnModel& model, const Matrix& adjacency,
                              const Matrix& features, const DropoutMasks& masks) {
  check_shapes(model, adjacency, features);
  Trace t = run_forward(model, adjacency, matmul(adjacency, features), masks);
  GcnForward out;
  out.scores = scores_of(t.logits);
  out.hidden = model.layers() > 1 ? relu(t.pre.front()) : std::move(t.ax);
  out.masks = masks;
  return out;
}

GcnForward gcn_forward(const GcnModel& model, const Matrix& adjacency, const Matrix& features,
                       Rng* dropout_rng) {
  check_shapes(model, adjacency, features);
  DropoutMasks masks;
  if (dropout_rng != nullptr) masks = draw_masks(model, features.rows(), *dropout_rng);
  return gcn_forward_masked(model, adjacency, features, masks);
}

double gcn_loss(std::span<const double> scores, const std::vector<bool>& labelled,
                double lambda) {
  check_groups(labelled, scores.size());
  double pos = 0.0;
  double neg = 0.0;
  std::size_t nl = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], kScoreClamp, 1.0 - kScoreClamp);
    if (labelled[i]) {
      pos -= std::log(s);
      ++nl;
    } else {
      neg -= std::log(1.0 - s);
    }
  }
  const auto nu = scores.size() - nl;
  return pos / static_cast<double>(nl) + lambda * neg / static_cast<double>(nu);
}

std::vector<Matrix> gcn_backward(const GcnModel& model, const Matrix& adjacency,
                                 const Matrix& features, const std::vector<bool>& labelled,
                                 double lambda, const DropoutMasks& masks) {
  check_shapes(model, adjacency, features);
  const Trace t = run_forward(model, adjacency, matmul(adjacency, features), masks);
  return backward(model, adjacency, t, labelled, lambda, masks);
}

GcnModel train_gcn(const Matrix& adjacency, const Matrix& features,
                   const std::vector<bool>& labelled, const GcnTrainConfig& config) {
  config.validate();
  check_groups(labelled, features.rows());
  Rng rng(config.seed);
  GcnModel model =
      GcnModel::initialize(features.cols(), config.resolved_hidden_width(features.cols()),
                           config.layers, config.dropout, rng);
  check_shapes(model, adjacency, features);

  // A·X does not change across epochs.
  const Matrix ax = matmul(adjacency, features);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const DropoutMasks masks = draw_masks(model, features.rows(), rng);
    const Trace t = run_forward(model, adjacency, ax, masks);
    const auto grads = backward(model, adjacency, t, labelled, config.lambda, masks);
    for (std::size_t k = 0; k < model.layers(); ++k) {
      adam_update(model.weights[k], grads[k], model.optimizer[k], config.lr, config.weight_decay);
    }
  }
  for (const Matrix& w : model.weights) require_finite(w, "train_gcn");
  return model;
}

Matrix gcn_hidden(const GcnModel& model, const Matrix& adjacency, const Matrix& features) {
  return gcn_forward(model, adjacency, features).hidden;
}

}  // namespace gcnal
