#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "gcnal/numerics.hpp"

namespace gcnal {

enum class AdjacencyMode { kSimilarity, kIdentity, kOnes };

const char* to_string(AdjacencyMode mode);
std::optional<AdjacencyMode> parse_adjacency_mode(std::string_view text);

struct Adjacency {
  Matrix a;
  AdjacencyMode mode = AdjacencyMode::kSimilarity;
};

// Degrees with magnitude below this mark a node with no similar neighbours.
inline constexpr double kDegreeGuard = 1e-12;

/// Similarity mode: S = V·Vᵀ over l2-normalized rows, then
/// A = D⁻¹(S − I) + I with D the row sums of S − I. A row whose degree is
/// below kDegreeGuard in magnitude becomes the unit self-loop e_i.
/// Identity and ones modes ignore the feature values.
Adjacency build_adjacency(const Matrix& features, AdjacencyMode mode = AdjacencyMode::kSimilarity);

struct GraphNodes {
  Matrix features;                // labelled rows first, then unlabelled
  std::vector<bool> labelled;     // one flag per node
};

GraphNodes node_init(const Matrix& labelled_features, const Matrix& unlabelled_features);

}  // namespace gcnal
