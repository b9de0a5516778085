#include <gtest/gtest.h>

#include <cmath>

#include "gcnal/error.hpp"
#include "gcnal/graph.hpp"
#include "gcnal/rng.hpp"
#include "oracles.hpp"

namespace gcnal {
namespace {

void expect_matrix_near(const Matrix& got, const Matrix& want, double tol) {
  ASSERT_TRUE(got.same_shape(want)) << shape_string(got) << " vs " << shape_string(want);
  EXPECT_LE(max_abs_diff(got, want), tol);
}

TEST(Adjacency, IdenticalRowsShareWeightEvenly) {
  const Matrix a = build_adjacency(Matrix{{1, 0}, {1, 0}, {1, 0}}).a;
  expect_matrix_near(a, Matrix{{1, 0.5, 0.5}, {0.5, 1, 0.5}, {0.5, 0.5, 1}}, 1e-12);
}

TEST(Adjacency, OrthogonalRowsFallBackToIdentity) {
  EXPECT_EQ(build_adjacency(Matrix{{1, 0}, {0, 1}}).a, Matrix::identity(2));
}

TEST(Adjacency, DiagonalChainExample) {
  const double h = std::sqrt(2.0) / 2.0;
  const Matrix x{{1, 0}, {h, h}, {0, 1}};
  const Matrix want{{1, 1, 0}, {0.5, 1, 0.5}, {0, 1, 1}};
  expect_matrix_near(build_adjacency(x).a, want, 1e-12);
  expect_matrix_near(testing::literal_adjacency(x), want, 1e-12);
}

TEST(Adjacency, MatchesLiteralConstructionOnRandomFeatures) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix x(1 + rng.below(12), 1 + rng.below(6));
    for (double& v : x.values()) v = rng.normal();
    const Matrix got = build_adjacency(x).a;
    const Matrix want = testing::literal_adjacency(x);
    EXPECT_LE(max_abs_diff(got, want), 1e-9) << "trial " << trial;
  }
}

TEST(Adjacency, RowSumsDiagonalAndBoundsForNonnegativeFeatures) {
  Rng rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix x(1 + rng.below(10), 1 + rng.below(5));
    for (double& v : x.values()) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    const Matrix a = build_adjacency(x).a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      EXPECT_EQ(a(i, i), 1.0);
      double sum = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) {
        EXPECT_GE(a(i, j), 0.0);
        EXPECT_LE(a(i, j), 1.0 + 1e-12);
        sum += a(i, j);
      }
      EXPECT_TRUE(std::abs(sum - 2.0) < 1e-6 || sum == 1.0) << "row sum " << sum;
    }
  }
}

TEST(Adjacency, ZeroFeatureRowsBecomeSelfLoops) {
  const Matrix a = build_adjacency(Matrix{{0, 0}, {1, 1}, {2, 2}}).a;
  expect_matrix_near(a, Matrix{{1, 0, 0}, {0, 1, 1}, {0, 1, 1}}, 1e-12);
}

TEST(Adjacency, DuplicateRowsGetEqualWeights) {
  Rng rng(19);
  Matrix x(5, 3);
  for (double& v : x.values()) v = rng.uniform();
  for (std::size_t k = 0; k < 3; ++k) x(3, k) = x(1, k);
  const Matrix a = build_adjacency(x).a;
  for (std::size_t i : {0u, 2u, 4u}) EXPECT_NEAR(a(i, 1), a(i, 3), 1e-12);
}

TEST(Adjacency, AblationModes) {
  const Matrix x{{1, 2}, {3, 4}, {5, 6}};
  EXPECT_EQ(build_adjacency(x, AdjacencyMode::kIdentity).a, Matrix::identity(3));
  EXPECT_EQ(build_adjacency(x, AdjacencyMode::kOnes).a, Matrix(3, 3, 1.0));
  EXPECT_EQ(parse_adjacency_mode("ones"), AdjacencyMode::kOnes);
  EXPECT_FALSE(parse_adjacency_mode("sparse").has_value());
}

TEST(NodeInit, LabelledRowsFirstWithMask) {
  const GraphNodes g = node_init(Matrix{{1}, {2}}, Matrix{{3}, {4}, {5}});
  EXPECT_EQ(g.features, (Matrix{{1}, {2}, {3}, {4}, {5}}));
  EXPECT_EQ(g.labelled, (std::vector<bool>{true, true, false, false, false}));
}

TEST(NodeInit, NoUnlabelledRowsGivesAllOnesMask) {
  const GraphNodes g = node_init(Matrix{{1, 0}}, Matrix(0, 2));
  EXPECT_EQ(g.labelled, std::vector<bool>{true});
}

TEST(NodeInit, PermutingUnlabelledPermutesRows) {
  const GraphNodes a = node_init(Matrix{{0}}, Matrix{{1}, {2}});
  const GraphNodes b = node_init(Matrix{{0}}, Matrix{{2}, {1}});
  EXPECT_EQ(a.features(1, 0), b.features(2, 0));
  EXPECT_EQ(a.features(2, 0), b.features(1, 0));
}

TEST(NodeInit, WidthMismatchThrows) {
  EXPECT_THROW(node_init(Matrix{{1, 2}}, Matrix{{1}}), Error);
}

}  // namespace
}  // namespace gcnal
