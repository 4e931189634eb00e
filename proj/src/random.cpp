#include "hcrp/random.hpp"

#include "hcrp/error.hpp"

namespace hcrp {

namespace {

std::seed_seq makeSeedSeq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream),
                       static_cast<std::uint32_t>(stream >> 32), 0x68637270u};
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  auto seq = makeSeedSeq(seed, stream);
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniformPositive() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "Rng::below(0)");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw Error(ErrorCode::InvalidArgument, "gamma draw needs positive shape and rate");
  return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
}

double Rng::beta(double a, double b) {
  double x = gamma(a, 1.0);
  double y = gamma(b, 1.0);
  if (x + y == 0.0) return a / (a + b);
  return x / (x + y);
}

double Rng::normal() { return std::normal_distribution<double>()(engine_); }

std::size_t Rng::categorical(std::span<const double> weights, double total) {
  if (weights.empty() || !(total > 0.0))
    throw Error(ErrorCode::InvalidArgument, "categorical draw needs positive total weight");
  double u = uniform() * total;
  std::size_t last = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    if (u < weights[i]) return i;
    u -= weights[i];
    last = i;
  }
  // rounding left a sliver past the end
  return last;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  return categorical(weights, total);
}

}  // namespace hcrp
