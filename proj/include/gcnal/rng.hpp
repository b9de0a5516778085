#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gcnal {

/// Seeded pseudo-random stream.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// derives every variate from raw 64-bit draws, so sequences do not depend on
/// the standard library's distribution implementations.
///
/// Seed derivation:
///   - trial t of an experiment with base seed s uses seed s + t;
///   - a named purpose stream is Rng(mix(seed, fnv1a(name), index)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Standard normal (Box-Muller, one cached spare).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct positions from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  // Independent stream for a named purpose, optionally indexed (e.g. by cycle).
  Rng derive(std::string_view purpose, std::uint64_t index = 0) const;

  static std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) {
    return base_seed + trial;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gcnal
