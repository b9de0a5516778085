#include "gcnal/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcnal/error.hpp"

namespace gcnal {
namespace {

struct ForwardCache {
  Matrix pre;     // X W1 + b1
  Matrix hidden;  // act(pre)
  Matrix out;     // hidden W2 + b2
};

void add_row_bias(Matrix& m, const Matrix& bias) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias(0, j);
  }
}

Matrix column_sums(const Matrix& m) {
  Matrix s(1, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) s(0, j) += r[j];
  }
  return s;
}

ForwardCache forward(const MlpParams& p, HiddenActivation act, const Matrix& x) {
  ForwardCache c;
  c.pre = matmul(x, p.w1);
  add_row_bias(c.pre, p.b1);
  c.hidden = act == HiddenActivation::kRelu ? relu(c.pre) : c.pre;
  c.out = matmul(c.hidden, p.w2);
  add_row_bias(c.out, p.b2);
  return c;
}

void check_batch(const MlpLearner& model, const Dataset& batch) {
  if (batch.size() == 0) throw Error("empty batch");
  if (batch.task != model.task()) throw Error("task kind of data does not match the model");
  if (batch.input_width() != model.input_width()) {
    throw Error("input width " + std::to_string(batch.input_width()) + " does not match model " +
                std::to_string(model.input_width()));
  }
  if (batch.output_width() != model.output_width()) {
    throw Error("output width " + std::to_string(batch.output_width()) +
                " does not match model " + std::to_string(model.output_width()));
  }
}

// Gradient of the mean loss with respect to the output layer pre-activations.
Matrix output_delta(const MlpLearner& model, const Matrix& out, const Dataset& batch) {
  const double n = static_cast<double>(batch.size());
  if (model.task() == TaskKind::kClassification) {
    Matrix d = softmax_rows(out);
    for (std::size_t i = 0; i < d.rows(); ++i) {
      d(i, static_cast<std::size_t>(batch.labels[i])) -= 1.0;
      for (double& x : d.row(i)) x /= n;
    }
    return d;
  }
  const double scale = 2.0 / (n * static_cast<double>(out.cols()));
  Matrix d(out.rows(), out.cols());
  for (std::size_t i = 0; i < out.size(); ++i)
    d.values()[i] = scale * (out.values()[i] - batch.targets.values()[i]);
  return d;
}

template <typename StepFn>
MlpLearner fit(const Dataset& data, const TrainSchedule& schedule, Rng& rng,
               const LearnerOptions& options, StepFn&& step) {
  if (data.size() == 0) throw Error("cannot train on an empty labelled set");
  data.validate();
  schedule.validate();
  MlpLearner model = MlpLearner::initialize(data.task, data.input_width(), data.output_width(),
                                            options, rng);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    rng.shuffle(order);
    const double lr = schedule.lr_at(epoch);
    for (std::size_t start = 0; start < order.size(); start += schedule.batch_size) {
      const std::size_t stop = std::min(order.size(), start + schedule.batch_size);
      const Dataset batch =
          data.subset(std::span<const std::size_t>(order.data() + start, stop - start));
      step(model.params(), mlp_gradients(model, batch), lr);
    }
  }
  const auto& p = model.params();
  for (const Matrix* m : {&p.w1, &p.b1, &p.w2, &p.b2}) require_finite(*m, "learner training");
  return model;
}

}  // namespace

const char* to_string(TaskKind task) {
  return task == TaskKind::kClassification ? "classification" : "regression";
}

Dataset Dataset::classification(Matrix inputs, std::vector<int> labels, int num_classes) {
  Dataset d;
  d.inputs = std::move(inputs);
  d.task = TaskKind::kClassification;
  d.labels = std::move(labels);
  if (num_classes <= 0 && !d.labels.empty()) {
    num_classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  }
  d.num_classes = num_classes;
  d.validate();
  return d;
}

Dataset Dataset::regression(Matrix inputs, Matrix targets) {
  Dataset d;
  d.inputs = std::move(inputs);
  d.task = TaskKind::kRegression;
  d.targets = std::move(targets);
  d.validate();
  return d;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset d;
  d.task = task;
  d.num_classes = num_classes;
  d.inputs = select_rows(inputs, rows);
  if (task == TaskKind::kClassification) {
    d.labels.reserve(rows.size());
    for (std::size_t r : rows) d.labels.push_back(labels.at(r));
  } else {
    d.targets = select_rows(targets, rows);
  }
  return d;
}

void Dataset::validate() const {
  if (task == TaskKind::kClassification) {
    if (labels.size() != inputs.rows()) {
      throw Error("dataset has " + std::to_string(inputs.rows()) + " inputs but " +
                  std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= num_classes) {
        throw Error("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                    " outside [0, " + std::to_string(num_classes) + ")");
      }
    }
  } else {
    if (targets.rows() != inputs.rows()) throw Error("regression targets/input row mismatch");
    if (targets.cols() == 0) throw Error("regression target width must be at least 1");
  }
}

TrainSchedule TrainSchedule::regression_default() {
  TrainSchedule s;
  s.lr = 1e-3;
  return s;
}

void TrainSchedule::validate() const {
  if (batch_size == 0) throw Error("batch_size must be positive");
  if (!(lr > 0.0)) throw Error("learning rate must be positive");
  if (momentum < 0.0 || weight_decay < 0.0 || lr_decay_factor <= 0.0) {
    throw Error("momentum, weight decay and decay factor must be non-negative");
  }
  if (epochs > 0 && lr_decay_epoch > epochs) throw Error("lr_decay_epoch exceeds epochs");
}

MlpLearner MlpLearner::initialize(TaskKind task, std::size_t input_width,
                                  std::size_t output_width, const LearnerOptions& options,
                                  Rng& rng) {
  if (input_width == 0 || output_width == 0 || options.hidden_width == 0) {
    throw Error("MLP widths must be positive");
  }
  MlpParams p;
  p.w1 = Matrix(input_width, options.hidden_width);
  const double bound = std::sqrt(6.0 / static_cast<double>(input_width));
  for (double& w : p.w1.values()) w = rng.uniform(-bound, bound);
  p.b1 = Matrix(1, options.hidden_width);
  p.w2 = Matrix(options.hidden_width, output_width);
  p.b2 = Matrix(1, output_width);
  return MlpLearner(task, options.activation, std::move(p));
}

Matrix MlpLearner::extract_features(const Matrix& inputs) const {
  if (inputs.cols() != input_width()) {
    throw Error("extract_features: input width " + std::to_string(inputs.cols()) +
                " != model width " + std::to_string(input_width()));
  }
  return forward(params_, activation_, inputs).hidden;
}

Matrix MlpLearner::outputs(const Matrix& inputs) const {
  if (inputs.cols() != input_width()) {
    throw Error("input width " + std::to_string(inputs.cols()) + " != model width " +
                std::to_string(input_width()));
  }
  return forward(params_, activation_, inputs).out;
}

Matrix MlpLearner::predict_posterior(const Matrix& inputs) const {
  if (task_ != TaskKind::kClassification) {
    throw Error("predict_posterior called on a regression model");
  }
  return softmax_rows(outputs(inputs));
}

double MlpLearner::evaluate(const Dataset& test) const {
  if (test.size() == 0) throw Error("cannot evaluate on an empty test set");
  if (test.task != task_) throw Error("evaluate: task kind mismatch");
  if (task_ == TaskKind::kClassification) {
    const auto predicted = argmax_rows(outputs(test.inputs));
    return accuracy(predicted, test.labels);
  }
  return mean_squared_error(outputs(test.inputs), test.targets);
}

double mlp_loss(const MlpLearner& model, const Dataset& batch) {
  check_batch(model, batch);
  const Matrix out = model.outputs(batch.inputs);
  if (model.task() == TaskKind::kRegression) return mean_squared_error(out, batch.targets);
  double total = 0.0;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto r = out.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    for (double v : r) z += std::exp(v - mx);
    total += mx + std::log(z) - r[static_cast<std::size_t>(batch.labels[i])];
  }
  return total / static_cast<double>(out.rows());
}

MlpParams mlp_gradients(const MlpLearner& model, const Dataset& batch) {
  check_batch(model, batch);
  const MlpParams& p = model.params();
  const ForwardCache c = forward(p, model.activation(), batch.inputs);
  const Matrix d_out = output_delta(model, c.out, batch);

  MlpParams g;
  g.w2 = matmul_tn(c.hidden, d_out);
  g.b2 = column_sums(d_out);
  Matrix d_pre = matmul_nt(d_out, p.w2);
  if (model.activation() == HiddenActivation::kRelu) {
    for (std::size_t i = 0; i < d_pre.size(); ++i)
      if (!(c.pre.values()[i] > 0.0)) d_pre.values()[i] = 0.0;
  }
  g.w1 = matmul_tn(batch.inputs, d_pre);
  g.b1 = column_sums(d_pre);
  return g;
}

MlpLearner train_classifier(const Dataset& data, const TrainSchedule& schedule, Rng& rng,
                            const LearnerOptions& options) {
  if (data.task != TaskKind::kClassification) throw Error("train_classifier needs class labels");
  MlpParams velocity;
  bool ready = false;
  return fit(data, schedule, rng, options, [&](MlpParams& p, const MlpParams& g, double lr) {
    if (!ready) {
      velocity = {Matrix(p.w1.rows(), p.w1.cols()), Matrix(1, p.b1.cols()),
                  Matrix(p.w2.rows(), p.w2.cols()), Matrix(1, p.b2.cols())};
      ready = true;
    }
    const double mu = schedule.momentum;
    const double wd = schedule.weight_decay;
    sgd_momentum_update(p.w1, g.w1, velocity.w1, lr, mu, wd);
    sgd_momentum_update(p.b1, g.b1, velocity.b1, lr, mu, wd);
    sgd_momentum_update(p.w2, g.w2, velocity.w2, lr, mu, wd);
    sgd_momentum_update(p.b2, g.b2, velocity.b2, lr, mu, wd);
  });
}

MlpLearner train_regressor(const Dataset& data, const TrainSchedule& schedule, Rng& rng,
                           const LearnerOptions& options) {
  if (data.task != TaskKind::kRegression) throw Error("train_regressor needs real targets");
  AdamState s_w1, s_b1, s_w2, s_b2;
  return fit(data, schedule, rng, options, [&](MlpParams& p, const MlpParams& g, double lr) {
    const double wd = schedule.weight_decay;
    adam_update(p.w1, g.w1, s_w1, lr, wd);
    adam_update(p.b1, g.b1, s_b1, lr, wd);
    adam_update(p.w2, g.w2, s_w2, lr, wd);
    adam_update(p.b2, g.b2, s_b2, lr, wd);
  });
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw Error("accuracy: length mismatch");
  if (truth.empty()) throw Error("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double mean_squared_error(const Matrix& predicted, const Matrix& truth) {
  if (!predicted.same_shape(truth)) throw Error("mean_squared_error: shape mismatch");
  if (predicted.rows() == 0 || predicted.cols() == 0) throw Error("mean_squared_error: empty");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < predicted.cols(); ++j) {
      const double d = predicted(i, j) - truth(i, j);
      row += d * d;
    }
    total += row / static_cast<double>(predicted.cols());
  }
  return total / static_cast<double>(predicted.rows());
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

LearnerTrainer make_mlp_trainer(const TrainSchedule& schedule, const LearnerOptions& options) {
  return [schedule, options](const Dataset& labelled, Rng& rng) -> std::unique_ptr<Learner> {
    if (labelled.task == TaskKind::kClassification) {
      return std::make_unique<MlpLearner>(train_classifier(labelled, schedule, rng, options));
    }
    return std::make_unique<MlpLearner>(train_regressor(labelled, schedule, rng, options));
  };
}

}  // namespace gcnal
