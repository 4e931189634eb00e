#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace hcrp {

// Seeded generator for one sampling chain.  Every chain owns exactly one Rng;
// independent chains use distinct (seed, stream) pairs.  The stream number is
// mixed into the seed sequence so chains started from the same user seed but
// different streams do not overlap in practice.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform double in (0, 1).
  double uniformPositive();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);
  double beta(double a, double b);
  double normal();

  /// Index drawn proportionally to non-negative weights.  `total` must be the
  /// sum of the weights.
  std::size_t categorical(std::span<const double> weights, double total);
  std::size_t categorical(std::span<const double> weights);

  template <typename It>
  void shuffle(It first, It last) {
    for (auto n = last - first; n > 1; --n) {
      auto k = static_cast<decltype(n)>(below(static_cast<std::size_t>(n)));
      std::swap(first[n - 1], first[k]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hcrp
