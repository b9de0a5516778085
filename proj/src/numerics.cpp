#include "gcnal/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "gcnal/error.hpp"

namespace gcnal {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error("Matrix: data length " + std::to_string(data_.size()) + " != " +
                std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool all_finite(const Matrix& m) noexcept {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double x) { return std::isfinite(x); });
}

void require_finite(const Matrix& m, std::string_view where) {
  if (!all_finite(m)) throw Error(std::string(where) + ": non-finite value");
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error("matmul: shape mismatch " + shape_string(a) + " * " + shape_string(b));
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw Error("matmul_tn: shape mismatch " + shape_string(a) + "^T * " + shape_string(b));
  }
  Matrix c(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* brow = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      double* out = c.row(i).data();
      for (std::size_t j = 0; j < n; ++j) out[j] += aki * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw Error("matmul_nt: shape mismatch " + shape_string(a) + " * " + shape_string(b) + "^T");
  }
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ar = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto br = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < ar.size(); ++k) s += ar[k] * br[k];
      c(i, j) = s;
    }
  }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= m.rows()) throw Error("select_rows: row index out of range");
    std::copy_n(m.row(rows[r]).begin(), m.cols(), out.row(r).begin());
  }
  return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.empty()) return bottom;
  if (bottom.empty()) return top;
  if (top.cols() != bottom.cols()) {
    throw Error("vstack: width mismatch " + shape_string(top) + " / " + shape_string(bottom));
  }
  std::vector<double> data(top.storage());
  data.insert(data.end(), bottom.storage().begin(), bottom.storage().end());
  return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw Error("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix relu(const Matrix& m) {
  Matrix out(m);
  for (double& x : out.values()) x = relu(x);
  return out;
}

Matrix sigmoid(const Matrix& m) {
  Matrix out(m);
  for (double& x : out.values()) x = sigmoid(x);
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto in = logits.row(i);
    auto dst = out.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      dst[j] = std::exp(in[j] - mx);
      total += dst[j];
    }
    for (double& x : dst) x /= total;
  }
  return out;
}

Matrix l2_normalize_rows(const Matrix& m) {
  Matrix out(m);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    double sq = 0.0;
    for (double x : r) sq += x * x;
    if (sq == 0.0) continue;
    const double norm = std::sqrt(sq);
    for (double& x : r) x /= norm;
  }
  return out;
}

Matrix pairwise_sqdist(const Matrix& xa, const Matrix& xb) {
  if (xa.cols() != xb.cols()) {
    throw Error("pairwise_sqdist: width mismatch " + shape_string(xa) + " vs " + shape_string(xb));
  }
  Matrix d(xa.rows(), xb.rows());
  for (std::size_t i = 0; i < xa.rows(); ++i) {
    const auto a = xa.row(i);
    for (std::size_t j = 0; j < xb.rows(); ++j) {
      const auto b = xb.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      d(i, j) = s;
    }
  }
  return d;
}

AdamState AdamState::like(const Matrix& param) {
  AdamState s;
  s.m = Matrix(param.rows(), param.cols());
  s.v = Matrix(param.rows(), param.cols());
  return s;
}

void adam_update(Matrix& param, const Matrix& grad, AdamState& state, double lr,
                 double weight_decay) {
  if (!param.same_shape(grad)) {
    throw Error("adam: param " + shape_string(param) + " vs grad " + shape_string(grad));
  }
  if (state.m.empty() && state.v.empty() && param.size() != 0) {
    state.m = Matrix(param.rows(), param.cols());
    state.v = Matrix(param.rows(), param.cols());
  }
  if (!state.m.same_shape(param) || !state.v.same_shape(param)) {
    throw Error("adam: moment shape does not match param " + shape_string(param));
  }
  if (!(lr > 0.0)) throw Error("adam: lr must be positive");

  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  auto p = param.values();
  auto g = grad.values();
  auto m = state.m.values();
  auto v = state.v.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = g[i] + weight_decay * p[i];
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gi;
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gi * gi;
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

AdamResult adam_step(const Matrix& param, const Matrix& grad, const AdamState& state, double lr,
                     double weight_decay) {
  AdamResult r{param, state};
  adam_update(r.param, grad, r.state, lr, weight_decay);
  return r;
}

void sgd_momentum_update(Matrix& param, const Matrix& grad, Matrix& velocity, double lr,
                         double momentum, double weight_decay) {
  if (!param.same_shape(grad) || !param.same_shape(velocity)) {
    throw Error("sgd: shape mismatch for param " + shape_string(param));
  }
  auto p = param.values();
  auto g = grad.values();
  auto v = velocity.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    v[i] = momentum * v[i] + (g[i] + weight_decay * p[i]);
    p[i] -= lr * v[i];
  }
}

SgdResult sgd_momentum_step(const Matrix& param, const Matrix& grad, const Matrix& velocity,
                            double lr, double momentum, double weight_decay) {
  SgdResult r{param, velocity};
  sgd_momentum_update(r.param, grad, r.velocity, lr, momentum, weight_decay);
  return r;
}

}  // namespace gcnal
