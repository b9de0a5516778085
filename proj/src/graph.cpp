#include "gcnal/graph.hpp"

#include <cmath>

#include "gcnal/error.hpp"

namespace gcnal {

const char* to_string(AdjacencyMode mode) {
  switch (mode) {
    case AdjacencyMode::kSimilarity: return "similarity";
    case AdjacencyMode::kIdentity: return "identity";
    case AdjacencyMode::kOnes: return "ones";
  }
  return "similarity";
}

std::optional<AdjacencyMode> parse_adjacency_mode(std::string_view text) {
  if (text == "similarity") return AdjacencyMode::kSimilarity;
  if (text == "identity") return AdjacencyMode::kIdentity;
  if (text == "ones") return AdjacencyMode::kOnes;
  return std::nullopt;
}

Adjacency build_adjacency(const Matrix& features, AdjacencyMode mode) {
  const std::size_t n = features.rows();
  if (n == 0) throw Error("build_adjacency: no nodes");
  switch (mode) {
    case AdjacencyMode::kIdentity: return {Matrix::identity(n), mode};
    case AdjacencyMode::kOnes: return {Matrix(n, n, 1.0), mode};
    case AdjacencyMode::kSimilarity: break;
  }

  const Matrix v = l2_normalize_rows(features);
  Matrix a = matmul_nt(v, v);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = a.row(i);
    // S_ii is one for every unit row, so (S - I)_ii is taken as exactly zero.
    // An all-zero feature row has no similarities and falls to the guard.
    row[i] = 0.0;
    double degree = 0.0;
    for (double x : row) degree += x;
    if (std::abs(degree) < kDegreeGuard) {
      std::fill(row.begin(), row.end(), 0.0);
    } else {
      for (double& x : row) x /= degree;
    }
    row[i] = 1.0;
  }
  require_finite(a, "build_adjacency");
  return {std::move(a), mode};
}

GraphNodes node_init(const Matrix& labelled_features, const Matrix& unlabelled_features) {
  if (!labelled_features.empty() && !unlabelled_features.empty() &&
      labelled_features.cols() != unlabelled_features.cols()) {
    throw Error("node_init: feature widths differ (" + std::to_string(labelled_features.cols()) +
                " vs " + std::to_string(unlabelled_features.cols()) + ")");
  }
  GraphNodes g;
  g.features = vstack(labelled_features, unlabelled_features);
  g.labelled.assign(labelled_features.rows(), true);
  g.labelled.resize(labelled_features.rows() + unlabelled_features.rows(), false);
  return g;
}

}  // namespace gcnal
