#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hcrp {

/// Empirical mutual information between two aligned label sequences, in
/// nats.  Throws LengthMismatch for unequal or empty inputs.
double mutualInformation(std::span<const std::uint32_t> x, std::span<const std::uint32_t> h);

/// Empirical entropy of a label sequence, in nats.
double entropy(std::span<const std::uint32_t> h);

/// 1/2 plus the sample autocorrelations at lags 1..min(maxLag, T-1), each
/// normalized by (T - lag) and the population variance.  Throws ZeroVariance
/// for a constant series and InvalidArgument for fewer than two values.
double autocorrelationTime(std::span<const double> series, std::size_t maxLag = 1000);

/// exp of minus the mean log likelihood.  Throws ZeroLikelihood naming the
/// first position whose likelihood is zero.
double perplexity(std::span<const double> likelihoods);

/// Averages the per-model likelihood rows (one row per model, one column per
/// test position) and returns the perplexity of the averages.
double perplexity(const std::vector<std::vector<double>>& rows);

}  // namespace hcrp
