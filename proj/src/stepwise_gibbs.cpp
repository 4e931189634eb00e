#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hcrp/error.hpp"
#include "hcrp/samplers.hpp"
#include "sequence_slots.hpp"

namespace hcrp {

namespace {

// Proposal for x_t on the state with the three customers around t removed:
//   q(k) ∝ [p(k | prev) + c·[k = next]] · p(next | k) · F_k(y_t)
// where c is the new-dish mass of the previous state's restaurant.  A next
// state that is no longer served gets its own candidate so that x_t = x_{t+1}
// stays reachable.
class StepwiseProposal final : public RestrictedProposal {
 public:
  StepwiseProposal(const HmmState& h, std::size_t t)
      : h_(h), t_(t), prev_(h.x[t - 1]), hasNext_(t < h.length()), next_(hasNext_ ? h.x[t + 1] : kNewDish),
        symbol_(h.y[t]) {}

  Sample sample(std::span<Franchise* const>, Rng& rng) override {
    prepare();
    const std::size_t i = rng.categorical(weights_, total_);
    DishId label = labels_[i];
    if (label == kNewDish) label = h_.freshLabel();
    Sample s;
    s.draws = {label, symbol_};
    if (hasNext_) s.draws.push_back(next_);
    s.logDensity = std::log(weights_[i] / total_);
    return s;
  }

  double logDensity(std::span<Franchise* const>, std::span<const DishId> draws) override {
    prepare();
    const double none = -std::numeric_limits<double>::infinity();
    if (draws[1] != symbol_ || (hasNext_ && draws[2] != next_)) return none;
    const DishId k = draws[0];
    if (k == kStartLabel || k == kNewDish) return none;
    std::size_t i;
    if (h_.trans.isSeen(k)) {
      i = static_cast<std::size_t>(std::lower_bound(labels_.begin(), labels_.begin() + seen_, k) - labels_.begin());
    } else if (hasNext_ && k == next_) {
      i = seen_;
    } else {
      i = labels_.size() - 1;
    }
    return std::log(weights_[i] / total_);
  }

 private:
  void prepare() {
    if (prepared_) return;
    prepared_ = true;
    const Franchise& tr = h_.trans;
    const Franchise& em = h_.emit;
    labels_ = tr.dishes();
    seen_ = labels_.size();
    const double c = tr.newDishProb(prev_);
    weights_.reserve(seen_ + 2);
    for (DishId k : labels_) {
      double w = tr.prob(prev_, k);
      if (hasNext_) {
        if (k == next_) w += c;
        w *= tr.prob(k, next_);
      }
      weights_.push_back(w * em.prob(k, symbol_));
    }
    if (hasNext_ && !tr.isSeen(next_)) {
      labels_.push_back(next_);
      weights_.push_back(c * tr.prob(next_, next_) * em.prob(next_, symbol_));
    }
    labels_.push_back(kNewDish);
    weights_.push_back(c * (hasNext_ ? tr.probFromEmpty(next_) : 1.0) * em.probFromEmpty(symbol_));
    total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }

  const HmmState& h_;
  std::size_t t_;
  DishId prev_;
  bool hasNext_;
  DishId next_;
  Symbol symbol_;
  bool prepared_ = false;
  std::vector<DishId> labels_;
  std::vector<double> weights_;
  std::size_t seen_ = 0;
  double total_ = 0.0;
};

}  // namespace

RcdOutcome stepwiseGibbsUpdate(HmmState& h, std::size_t t, Rng& rng) {
  if (t < 1 || t > h.length()) throw Error(ErrorCode::InvalidArgument, "position outside 1..T");
  const DrawRequest req = detail::sequenceRequest(h, t, t + 1);
  StepwiseProposal proposal(h, t);
  auto franchises = detail::franchisesOf(h);
  RcdOutcome out = rcdSample(franchises, req, proposal, rng);
  if (out.accepted) detail::writeBack(h, t, t + 1, out.draws);
  return out;
}

SweepStats stepwiseGibbsSweep(HmmState& h, Rng& rng) {
  std::vector<std::size_t> order(h.length());
  std::iota(order.begin(), order.end(), std::size_t{1});
  rng.shuffle(order.begin(), order.end());
  SweepStats stats;
  for (std::size_t t : order) {
    const RcdOutcome out = stepwiseGibbsUpdate(h, t, rng);
    ++stats.trials;
    if (out.accepted) ++stats.accepts;
  }
  return stats;
}

}  // namespace hcrp
