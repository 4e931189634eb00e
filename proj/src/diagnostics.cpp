#include "hcrp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "hcrp/error.hpp"

namespace hcrp {

double mutualInformation(std::span<const std::uint32_t> x, std::span<const std::uint32_t> h) {
  if (x.size() != h.size() || x.empty())
    throw Error(ErrorCode::LengthMismatch, "mutual information needs two non-empty sequences of equal length");
  std::map<std::pair<std::uint32_t, std::uint32_t>, long> joint;
  std::map<std::uint32_t, long> px;
  std::map<std::uint32_t, long> ph;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[{x[i], h[i]}];
    ++px[x[i]];
    ++ph[h[i]];
  }
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    const double pxy = c / n;
    mi += pxy * std::log(pxy * n * n / (static_cast<double>(px[key.first]) * static_cast<double>(ph[key.second])));
  }
  return std::max(mi, 0.0);
}

double entropy(std::span<const std::uint32_t> h) {
  if (h.empty()) throw Error(ErrorCode::LengthMismatch, "entropy of an empty sequence");
  std::map<std::uint32_t, long> counts;
  for (auto v : h) ++counts[v];
  const double n = static_cast<double>(h.size());
  double e = 0.0;
  for (const auto& kv : counts) {
    const double p = kv.second / n;
    e -= p * std::log(p);
  }
  return e;
}

double autocorrelationTime(std::span<const double> series, std::size_t maxLag) {
  const std::size_t T = series.size();
  if (T < 2) throw Error(ErrorCode::InvalidArgument, "autocorrelation time needs at least two values");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(T);
  std::vector<double> d(T);
  double var = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    d[i] = series[i] - mean;
    var += d[i] * d[i];
  }
  var /= static_cast<double>(T);
  if (!(var > 0.0)) throw Error(ErrorCode::ZeroVariance, "autocorrelation time of a constant series");
  double act = 0.5;
  const std::size_t lags = std::min(maxLag, T - 1);
  for (std::size_t lag = 1; lag <= lags; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < T; ++i) s += d[i] * d[i + lag];
    act += s / (static_cast<double>(T - lag) * var);
  }
  return act;
}

double perplexity(std::span<const double> likelihoods) {
  if (likelihoods.empty()) throw Error(ErrorCode::InvalidArgument, "perplexity of an empty test sequence");
  // logs taken relative to the first likelihood, summed with compensation,
  // so a constant sequence gives exactly 1/l
  const double ref = likelihoods[0];
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t t = 0; t < likelihoods.size(); ++t) {
    if (!(likelihoods[t] > 0.0))
      throw Error(ErrorCode::ZeroLikelihood, "zero likelihood at test position " + std::to_string(t + 1));
    const double v = std::log(likelihoods[t] / ref);
    const double next = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - next) + v : (v - next) + sum;
    sum = next;
  }
  return std::exp(-(sum + carry) / static_cast<double>(likelihoods.size())) / ref;
}

double perplexity(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "perplexity needs at least one model");
  const std::size_t T = rows.front().size();
  std::vector<double> mean(T, 0.0);
  for (const auto& row : rows) {
    if (row.size() != T) throw Error(ErrorCode::LengthMismatch, "likelihood rows differ in length");
    for (std::size_t t = 0; t < T; ++t) mean[t] += row[t];
  }
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return perplexity(mean);
}

}  // namespace hcrp
