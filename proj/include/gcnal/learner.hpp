#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gcnal/numerics.hpp"
#include "gcnal/rng.hpp"

namespace gcnal {

enum class TaskKind { kClassification, kRegression };

const char* to_string(TaskKind task);

/// Inputs plus either class labels or a real-valued target matrix.
struct Dataset {
  Matrix inputs;
  TaskKind task = TaskKind::kClassification;
  std::vector<int> labels;  // classification only
  Matrix targets;           // regression only, N x J
  int num_classes = 0;      // classification only; may exceed the labels present

  static Dataset classification(Matrix inputs, std::vector<int> labels, int num_classes = 0);
  static Dataset regression(Matrix inputs, Matrix targets);

  std::size_t size() const noexcept { return inputs.rows(); }
  std::size_t input_width() const noexcept { return inputs.cols(); }
  std::size_t output_width() const noexcept {
    return task == TaskKind::kClassification ? static_cast<std::size_t>(num_classes)
                                             : targets.cols();
  }

  Dataset subset(std::span<const std::size_t> rows) const;
  // Throws when shapes disagree or a label is out of range.
  void validate() const;
};

/// Mini-batch schedule with a single step decay of the learning rate.
struct TrainSchedule {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double lr_decay_factor = 0.1;
  std::size_t lr_decay_epoch = 80;

  static TrainSchedule classification_default() { return {}; }
  // Adam at 1e-3 for regression targets.
  static TrainSchedule regression_default();

  double lr_at(std::size_t epoch) const {
    return epoch >= lr_decay_epoch ? lr * lr_decay_factor : lr;
  }
  void validate() const;
};

enum class HiddenActivation { kRelu, kIdentity };

struct LearnerOptions {
  std::size_t hidden_width = 32;
  HiddenActivation activation = HiddenActivation::kRelu;
};

/// What the active-learning loop needs from a task model. Any implementation
/// honoring these contracts can replace the built-in MLP.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual TaskKind task() const = 0;
  virtual std::size_t input_width() const = 0;
  virtual std::size_t feature_width() const = 0;
  // One feature row per input row.
  virtual Matrix extract_features(const Matrix& inputs) const = 0;
  // Rows on the probability simplex. Throws for regression models.
  virtual Matrix predict_posterior(const Matrix& inputs) const = 0;
  // Accuracy for classification, mean squared error for regression.
  virtual double evaluate(const Dataset& test) const = 0;
};

using LearnerTrainer = std::function<std::unique_ptr<Learner>(const Dataset& labelled, Rng& rng)>;

struct MlpParams {
  Matrix w1;  // d x m
  Matrix b1;  // 1 x m
  Matrix w2;  // m x k
  Matrix b2;  // 1 x k
};

/// One-hidden-layer perceptron. The hidden activations are the features
/// handed to the sampler.
class MlpLearner final : public Learner {
 public:
  // Hidden layer uniform in ±sqrt(6/fan_in); output layer and biases zero.
  static MlpLearner initialize(TaskKind task, std::size_t input_width, std::size_t output_width,
                               const LearnerOptions& options, Rng& rng);

  TaskKind task() const override { return task_; }
  std::size_t input_width() const override { return params_.w1.rows(); }
  std::size_t feature_width() const override { return params_.w1.cols(); }
  std::size_t output_width() const { return params_.w2.cols(); }
  HiddenActivation activation() const { return activation_; }

  Matrix extract_features(const Matrix& inputs) const override;
  // Logits for classification, predictions for regression.
  Matrix outputs(const Matrix& inputs) const;
  Matrix predict_posterior(const Matrix& inputs) const override;
  double evaluate(const Dataset& test) const override;

  const MlpParams& params() const { return params_; }
  MlpParams& params() { return params_; }

 private:
  MlpLearner(TaskKind task, HiddenActivation activation, MlpParams params)
      : task_(task), activation_(activation), params_(std::move(params)) {}

  TaskKind task_;
  HiddenActivation activation_;
  MlpParams params_;
};

// Mean cross-entropy, or mean squared error over outputs, on `batch`.
double mlp_loss(const MlpLearner& model, const Dataset& batch);
// Exact gradient of mlp_loss with respect to every parameter.
MlpParams mlp_gradients(const MlpLearner& model, const Dataset& batch);

/// Mini-batch SGD with momentum on cross-entropy.
MlpLearner train_classifier(const Dataset& data, const TrainSchedule& schedule, Rng& rng,
                            const LearnerOptions& options = {});
/// Mini-batch Adam on the squared error.
MlpLearner train_regressor(const Dataset& data, const TrainSchedule& schedule, Rng& rng,
                           const LearnerOptions& options = {});

double accuracy(std::span<const int> predicted, std::span<const int> truth);
double mean_squared_error(const Matrix& predicted, const Matrix& truth);
std::vector<int> argmax_rows(const Matrix& m);

// Retrains an MLP from scratch on every call, dispatching on the task kind.
LearnerTrainer make_mlp_trainer(const TrainSchedule& schedule, const LearnerOptions& options = {});

}  // namespace gcnal
