#pragma once

// Restricted collapsed draw: a Metropolis-Hastings kernel that resamples a
// group of coupled draws from one or more franchises at once.  The old draws
// are removed, new draws are proposed from a restricted proposal evaluated on
// the emptied state, the new draws are seated, and the move is accepted with
// the ratio of proposal densities times the predictive factors collected
// while removing and adding.  A rejected move is undone from the log.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hcrp/franchise.hpp"
#include "hcrp/random.hpp"

namespace hcrp {

/// One draw slot per customer.  `franchiseOf[l]` says which franchise slot l
/// is drawn from; `restaurant(l, draws)` names its restaurant and may only
/// look at draws[0..l-1].
struct DrawRequest {
  std::vector<std::size_t> franchiseOf;
  std::function<RestaurantId(std::size_t slot, std::span<const DishId> draws)> restaurant;
  std::vector<DishId> oldDraws;

  std::size_t length() const { return franchiseOf.size(); }
};

class RestrictedProposal {
 public:
  struct Sample {
    std::vector<DishId> draws;
    double logDensity;
  };

  virtual ~RestrictedProposal() = default;
  /// Draws a full, concretely labelled draw vector from the emptied state.
  virtual Sample sample(std::span<Franchise* const> base, Rng& rng) = 0;
  /// Log density of `draws` on the emptied state; -inf outside the
  /// restriction.
  virtual double logDensity(std::span<Franchise* const> base, std::span<const DishId> draws) = 0;
};

struct RcdOutcome {
  bool accepted = false;
  std::vector<DishId> draws;
  double acceptProb = 0.0;
  double logRatio = 0.0;
};

/// The old draws must currently be seated.  Throws
/// ProposalOutsideRestriction when the proposal gives them zero density.
RcdOutcome rcdSample(std::span<Franchise* const> franchises, const DrawRequest& request,
                     RestrictedProposal& proposal, Rng& rng);

/// The predictive factor of Eq. r: joint draw probability over table-choice
/// probability.  Equals Franchise::prob for every table case.
double predictiveFactor(const Franchise& f, RestaurantId j, DishId k, int table);

/// Running log acceptance ratio compared against a threshold drawn up front.
/// Once every remaining factor is known to be at most one, the move can be
/// rejected as soon as the ratio falls below the threshold.
class RatioAccumulator {
 public:
  RatioAccumulator() = default;
  explicit RatioAccumulator(double threshold) : logThreshold_(std::log(threshold)) {}

  void multiply(double factor) { logRatio_ += std::log(factor); }
  void addLog(double logFactor) { logRatio_ += logFactor; }
  double logRatio() const { return logRatio_; }
  double ratio() const { return std::exp(logRatio_); }
  bool belowThreshold() const { return logRatio_ < logThreshold_; }

 private:
  double logRatio_ = 0.0;
  double logThreshold_ = -std::numeric_limits<double>::infinity();
};

}  // namespace hcrp
