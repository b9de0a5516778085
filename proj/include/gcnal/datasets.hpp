#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gcnal/learner.hpp"
#include "gcnal/rng.hpp"

namespace gcnal {

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

/// Gaussian class clusters. Centres are drawn once per coordinate from
/// N(0, spread²); samples add N(0, noise²) per coordinate.
struct BlobSpec {
  std::size_t dim = 32;
  double spread = 1.0;
  double noise = 1.0;
  std::vector<std::size_t> class_counts;  // samples per class before the split

  static BlobSpec balanced(std::size_t classes, std::size_t per_class, std::size_t dim,
                           double spread, double noise);
  // The last `reduced_classes` classes keep round(fraction · per_class) samples.
  static BlobSpec imbalanced(std::size_t classes, std::size_t per_class,
                             std::size_t reduced_classes, double fraction, std::size_t dim,
                             double spread, double noise);

  std::size_t classes() const noexcept { return class_counts.size(); }
  std::size_t total() const noexcept;
  void validate() const;
};

/// Targets are a fixed random linear map of standard-normal inputs plus
/// N(0, noise²) per output.
struct RegressionSpec {
  std::size_t samples = 2500;
  std::size_t dim = 8;
  std::size_t outputs = 4;
  double noise = 0.1;

  void validate() const;
};

// Fraction of each class (or of the whole set, for regression) held out.
inline constexpr double kTestFraction = 0.2;

/// Stratified 80/20 split; each class contributes round(0.2·count) test rows.
DatasetSplit generate_blobs(const BlobSpec& spec, Rng& rng);
DatasetSplit generate_regression(const RegressionSpec& spec, Rng& rng);
// Deterministic split of an existing dataset (stratified for classification).
DatasetSplit split_dataset(const Dataset& data, Rng& rng);

/// CSV with header feat_0..feat_{d-1} followed by either `label` or
/// target_0..target_{J-1} (a single `target` column is also accepted).
/// Errors name the offending line.
Dataset load_dataset(const std::filesystem::path& path);
void write_dataset(const Dataset& data, const std::filesystem::path& path);

/// Generator description as used by the `dataset` config key:
///   blobs:classes=10,per_class=250,dim=32,spread=1,noise=1,reduced_classes=0,reduced_fraction=0.1
///   regression:samples=2500,dim=8,outputs=4,noise=0.1
///   csv:<train.csv>[,<test.csv>]
struct DatasetSource {
  enum class Kind { kBlobs, kRegression, kCsv } kind = Kind::kBlobs;
  BlobSpec blobs;
  RegressionSpec regression;
  std::filesystem::path train_path;
  std::filesystem::path test_path;  // empty: split train_path 80/20

  static DatasetSource parse(std::string_view text);
  DatasetSplit materialize(Rng& rng) const;
};

}  // namespace gcnal
