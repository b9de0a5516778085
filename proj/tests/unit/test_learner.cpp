#include <gtest/gtest.h>

#include <cmath>

#include "gcnal/error.hpp"
#include "gcnal/learner.hpp"
#include "gcnal/rng.hpp"
#include "oracles.hpp"

namespace gcnal {
namespace {

Dataset two_blobs(std::size_t per_class, Rng& rng) {
  Matrix x(2 * per_class, 2);
  std::vector<int> y;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int c = i < per_class ? 0 : 1;
    x(i, 0) = (c == 0 ? -2.0 : 2.0) + 0.3 * rng.normal();
    x(i, 1) = 0.3 * rng.normal();
    y.push_back(c);
  }
  return Dataset::classification(std::move(x), std::move(y), 2);
}

Matrix randn(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

// Perturbs all four parameter blocks and compares against central differences.
double worst_gradient_error(MlpLearner& model, const Dataset& batch) {
  const MlpParams analytic = mlp_gradients(model, batch);
  const auto loss = [&] { return mlp_loss(model, batch); };
  double worst = 0.0;
  worst = std::max(worst, testing::max_relative_error(
                              analytic.w1, testing::central_differences(model.params().w1, loss)));
  worst = std::max(worst, testing::max_relative_error(
                              analytic.b1, testing::central_differences(model.params().b1, loss)));
  worst = std::max(worst, testing::max_relative_error(
                              analytic.w2, testing::central_differences(model.params().w2, loss)));
  worst = std::max(worst, testing::max_relative_error(
                              analytic.b2, testing::central_differences(model.params().b2, loss)));
  return worst;
}

void randomize_output_layer(MlpLearner& model, Rng& rng) {
  for (double& v : model.params().w2.values()) v = 0.5 * rng.normal();
  for (double& v : model.params().b1.values()) v = 0.1 * rng.normal();
  for (double& v : model.params().b2.values()) v = 0.1 * rng.normal();
}

TEST(MlpGradients, ClassificationMatchesFiniteDifferences) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(static_cast<int>(rng.below(3)));
    const Dataset batch = Dataset::classification(randn(n, 4, rng), y, 3);
    MlpLearner model = MlpLearner::initialize(TaskKind::kClassification, 4, 3, {5}, rng);
    randomize_output_layer(model, rng);
    EXPECT_LT(worst_gradient_error(model, batch), 1e-4);
  }
}

TEST(MlpGradients, RegressionMatchesFiniteDifferences) {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    const Dataset batch = Dataset::regression(randn(n, 3, rng), randn(n, 2, rng));
    MlpLearner model = MlpLearner::initialize(TaskKind::kRegression, 3, 2, {4}, rng);
    randomize_output_layer(model, rng);
    EXPECT_LT(worst_gradient_error(model, batch), 1e-4);
  }
}

TEST(TrainClassifier, SeparableBlobsReachPerfectTrainAccuracy) {
  Rng rng(1);
  const Dataset data = two_blobs(20, rng);
  Rng train_rng(2);
  const MlpLearner model = train_classifier(data, TrainSchedule{}, train_rng);
  EXPECT_EQ(model.evaluate(data), 1.0);
  EXPECT_EQ(argmax_rows(model.predict_posterior(data.inputs)), data.labels);
}

TEST(TrainClassifier, InitialCrossEntropyIsLogClassCount) {
  Rng rng(3);
  std::vector<int> y{0, 1, 2, 3, 4, 0, 1};
  const Dataset data = Dataset::classification(randn(7, 6, rng), y, 5);
  const MlpLearner model = MlpLearner::initialize(TaskKind::kClassification, 6, 5, {}, rng);
  EXPECT_NEAR(mlp_loss(model, data), std::log(5.0), 1e-12);
  const Matrix post = model.predict_posterior(data.inputs);
  for (double p : post.values()) EXPECT_NEAR(p, 0.2, 1e-12);
}

TEST(TrainClassifier, ZeroEpochsReturnsInitializedModel) {
  Rng rng(4);
  const Dataset data = two_blobs(10, rng);
  TrainSchedule s;
  s.epochs = 0;
  s.lr_decay_epoch = 0;
  Rng a(5), b(5);
  const MlpLearner trained = train_classifier(data, s, a);
  const MlpLearner init = MlpLearner::initialize(TaskKind::kClassification, 2, 2, {}, b);
  EXPECT_EQ(trained.params().w1, init.params().w1);
  EXPECT_EQ(trained.params().w2, init.params().w2);
  EXPECT_DOUBLE_EQ(trained.evaluate(data), 0.5);  // uniform posterior: argmax is class 0
}

TEST(TrainClassifier, EmptyLabelledSetIsAnError) {
  const Dataset empty = Dataset::classification(Matrix(0, 2), {}, 2);
  Rng rng(0);
  EXPECT_THROW(train_classifier(empty, TrainSchedule{}, rng), Error);
}

TEST(TrainClassifier, SameRngGivesBitIdenticalParameters) {
  Rng rng(6);
  const Dataset data = two_blobs(15, rng);
  Rng a(9), b(9);
  const MlpLearner m1 = train_classifier(data, TrainSchedule{}, a);
  const MlpLearner m2 = train_classifier(data, TrainSchedule{}, b);
  EXPECT_EQ(m1.params().w1, m2.params().w1);
  EXPECT_EQ(m1.params().b1, m2.params().b1);
  EXPECT_EQ(m1.params().w2, m2.params().w2);
  EXPECT_EQ(m1.params().b2, m2.params().b2);
}

TEST(Posterior, RowsOnSimplex) {
  Rng rng(7);
  MlpLearner model = MlpLearner::initialize(TaskKind::kClassification, 3, 4, {}, rng);
  randomize_output_layer(model, rng);
  const Matrix post = model.predict_posterior(randn(20, 3, rng));
  for (std::size_t i = 0; i < post.rows(); ++i) {
    double sum = 0.0;
    for (double p : post.row(i)) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Posterior, RegressionModelRejectsPosterior) {
  Rng rng(8);
  const MlpLearner model = MlpLearner::initialize(TaskKind::kRegression, 3, 2, {}, rng);
  EXPECT_THROW(model.predict_posterior(Matrix(1, 3)), Error);
}

TEST(Features, ShapeZeroWeightsAndDeterminism) {
  Rng rng(10);
  MlpLearner model = MlpLearner::initialize(TaskKind::kClassification, 3, 2, {7}, rng);
  const Matrix one = model.extract_features(Matrix{{1, 2, 3}});
  EXPECT_EQ(one.rows(), 1u);
  EXPECT_EQ(one.cols(), 7u);
  const Matrix twin = model.extract_features(Matrix{{1, 2, 3}, {1, 2, 3}});
  for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(twin(0, k), twin(1, k));
  EXPECT_THROW(model.extract_features(Matrix(1, 4)), Error);

  model.params().w1 = Matrix(3, 7);
  const Matrix zero = model.extract_features(randn(5, 3, rng));
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
}

TEST(Regression, ZeroTargetsGiveZeroLossAtInit) {
  Rng rng(11);
  const Dataset data = Dataset::regression(randn(6, 3, rng), Matrix(6, 2));
  const MlpLearner model = MlpLearner::initialize(TaskKind::kRegression, 3, 2, {}, rng);
  EXPECT_EQ(mlp_loss(model, data), 0.0);
}

TEST(Regression, SingleSampleLossIsMeanOverOutputs) {
  Rng rng(12);
  MlpLearner model = MlpLearner::initialize(TaskKind::kRegression, 2, 2, {3}, rng);
  randomize_output_layer(model, rng);
  const Matrix x{{0.3, -0.7}};
  const Matrix p = model.outputs(x);
  const Matrix y{{1.5, -2.0}};
  const double expected =
      ((p(0, 0) - y(0, 0)) * (p(0, 0) - y(0, 0)) + (p(0, 1) - y(0, 1)) * (p(0, 1) - y(0, 1))) / 2.0;
  EXPECT_NEAR(mlp_loss(model, Dataset::regression(x, y)), expected, 1e-15);
}

TEST(Regression, LineIsRecoveredByLinearCapacityModel) {
  Rng rng(13);
  Matrix x(64, 1), y(64, 1);
  for (std::size_t i = 0; i < 64; ++i) {
    x(i, 0) = 2.0 * rng.uniform() - 1.0;
    y(i, 0) = 2.0 * x(i, 0);
  }
  Matrix xt(32, 1), yt(32, 1);
  for (std::size_t i = 0; i < 32; ++i) {
    xt(i, 0) = 2.0 * rng.uniform() - 1.0;
    yt(i, 0) = 2.0 * xt(i, 0);
  }
  // The oracle fit confirms the target is exactly representable.
  EXPECT_LT(testing::least_squares_mse(x, y), 1e-20);

  TrainSchedule s = TrainSchedule::regression_default();
  s.epochs = 300;
  s.lr_decay_epoch = 300;
  s.weight_decay = 0.0;
  Rng train_rng(14);
  const MlpLearner model =
      train_regressor(Dataset::regression(x, y), s, train_rng, {4, HiddenActivation::kIdentity});
  EXPECT_LT(model.evaluate(Dataset::regression(xt, yt)), 1e-3);
}

TEST(Evaluate, AccuracyAndMseBasics) {
  const std::vector<int> truth{0, 1, 2, 1};
  EXPECT_EQ(accuracy(std::vector<int>{0, 1, 2, 1}, truth), 1.0);
  EXPECT_EQ(accuracy(std::vector<int>{0, 1, 2, 0}, truth), 0.75);
  EXPECT_EQ(mean_squared_error(Matrix{{1, 2}}, Matrix{{1, 2}}), 0.0);
  EXPECT_THROW(accuracy(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST(Dataset, ValidationRejectsOutOfRangeLabels) {
  EXPECT_THROW(Dataset::classification(Matrix(2, 1), {0, 3}, 2), Error);
  EXPECT_THROW(Dataset::regression(Matrix(2, 1), Matrix(3, 1)), Error);
}

}  // namespace
}  // namespace gcnal
