#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gcnal {

/// Dense row-major matrix of doubles.
///
/// Every product and reduction in this library walks its operands in a fixed
/// left-to-right order, so results are bit-reproducible for identical inputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::string shape_string(const Matrix& m);

bool all_finite(const Matrix& m) noexcept;
// Throws gcnal::Error naming `where` when any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view where);

// a·b
Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ·b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a·bᵀ
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);
Matrix vstack(const Matrix& top, const Matrix& bottom);

double max_abs_diff(const Matrix& a, const Matrix& b);

double relu(double x) noexcept;
double sigmoid(double x) noexcept;
Matrix relu(const Matrix& m);
Matrix sigmoid(const Matrix& m);
// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

/// Scales each row to unit Euclidean norm. All-zero rows pass through.
Matrix l2_normalize_rows(const Matrix& m);

/// result(i, j) = ‖xa_i − xb_j‖², evaluated as an explicit sum of squared
/// coordinate differences so every entry is exactly non-negative.
Matrix pairwise_sqdist(const Matrix& xa, const Matrix& xb);

struct AdamState {
  Matrix m;
  Matrix v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState like(const Matrix& param);
};

struct AdamResult {
  Matrix param;
  AdamState state;
};

/// One Adam step with bias correction. Weight decay is coupled: the update
/// uses grad + weight_decay·param.
AdamResult adam_step(const Matrix& param, const Matrix& grad, const AdamState& state, double lr,
                     double weight_decay);
// In-place variant used by the training loops.
void adam_update(Matrix& param, const Matrix& grad, AdamState& state, double lr,
                 double weight_decay);

struct SgdResult {
  Matrix param;
  Matrix velocity;
};

/// v' = momentum·v + (grad + weight_decay·param); param' = param − lr·v'.
SgdResult sgd_momentum_step(const Matrix& param, const Matrix& grad, const Matrix& velocity,
                            double lr, double momentum, double weight_decay);
void sgd_momentum_update(Matrix& param, const Matrix& grad, Matrix& velocity, double lr,
                         double momentum, double weight_decay);

}  // namespace gcnal
