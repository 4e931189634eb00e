#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "hcrp/error.hpp"
#include "hcrp/samplers.hpp"
#include "sequence_slots.hpp"

namespace hcrp {

std::size_t BlockLattice::columnOf(DishId label) const {
  auto it = std::lower_bound(states.begin(), states.end(), label);
  if (it != states.end() && *it == label) return static_cast<std::size_t>(it - states.begin());
  return newColumn();
}

BlockPlan drawBlockPlan(std::size_t T, std::size_t target, Rng& rng) {
  if (target == 0) throw Error(ErrorCode::InvalidArgument, "block size must be at least 1");
  BlockPlan plan;
  plan.length = T;
  if (T == 0) return plan;
  std::size_t pos = 1;
  std::size_t size = 1 + rng.below(target);
  while (pos <= T) {
    plan.starts.push_back(pos);
    pos += size;
    size = target == 1 ? 1 : target - 1 + rng.below(3);
  }
  return plan;
}

BlockLattice buildBlockLattice(const HmmState& h, std::size_t a, std::size_t b) {
  if (a < 1 || b <= a || b > h.length() + 1) throw Error(ErrorCode::InvalidArgument, "block outside 1..T");
  const Franchise& tr = h.trans;
  const Franchise& em = h.emit;
  BlockLattice lat;
  lat.states = tr.dishes();
  lat.length = b - a;
  const std::size_t C = lat.columns();
  const std::size_t K = C - 1;
  const DishId left = h.x[a - 1];

  lat.left.resize(C);
  for (std::size_t c = 0; c < K; ++c) lat.left[c] = tr.prob(left, lat.states[c]);
  lat.left[K] = tr.newDishProb(left);

  lat.right.assign(C, 1.0);
  if (b <= h.length()) {
    const DishId right = h.x[b];
    for (std::size_t c = 0; c < K; ++c) lat.right[c] = tr.prob(lat.states[c], right);
    lat.right[K] = tr.probFromEmpty(right);
  }

  lat.trans.resize(C * C);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t c = 0; c < K; ++c) lat.trans[i * C + c] = tr.prob(lat.states[i], lat.states[c]);
    lat.trans[i * C + K] = tr.newDishProb(lat.states[i]);
  }
  for (std::size_t c = 0; c < K; ++c) lat.trans[K * C + c] = tr.probFromEmpty(lat.states[c]);
  lat.trans[K * C + K] = tr.probFromEmpty(kNewDish);

  lat.emit.resize(lat.length * C);
  for (std::size_t l = 0; l < lat.length; ++l) {
    const Symbol s = h.y[a + l];
    for (std::size_t c = 0; c < K; ++c) lat.emit[l * C + c] = em.prob(lat.states[c], s);
    lat.emit[l * C + K] = em.probFromEmpty(s);
  }
  return lat;
}

namespace {

// Scaled forward messages; alpha[l*C + c] sums to one over c.  `logZ` is the
// log of the total path weight including the right boundary.
struct Forward {
  std::vector<double> alpha;
  double logZ = 0.0;
};

Forward forwardPass(const BlockLattice& lat) {
  const std::size_t C = lat.columns();
  const std::size_t L = lat.length;
  Forward f;
  f.alpha.resize(L * C);
  double logScale = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    double* cur = &f.alpha[l * C];
    if (l == 0) {
      for (std::size_t c = 0; c < C; ++c) cur[c] = lat.left[c] * lat.emission(0, c);
    } else {
      const double* prev = &f.alpha[(l - 1) * C];
      std::fill(cur, cur + C, 0.0);
      for (std::size_t i = 0; i < C; ++i) {
        const double p = prev[i];
        if (p == 0.0) continue;
        const double* row = &lat.trans[i * C];
        for (std::size_t c = 0; c < C; ++c) cur[c] += p * row[c];
      }
      for (std::size_t c = 0; c < C; ++c) cur[c] *= lat.emission(l, c);
    }
    const double norm = std::accumulate(cur, cur + C, 0.0);
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error(ErrorCode::ZeroLikelihoodBlock, "forward pass vanished inside the block");
    for (std::size_t c = 0; c < C; ++c) cur[c] /= norm;
    logScale += std::log(norm);
  }
  const double* last = &f.alpha[(L - 1) * C];
  double end = 0.0;
  for (std::size_t c = 0; c < C; ++c) end += last[c] * lat.right[c];
  if (!(end > 0.0)) throw Error(ErrorCode::ZeroLikelihoodBlock, "no path reaches the right boundary");
  f.logZ = logScale + std::log(end);
  return f;
}

// Backward sampling given forward messages; `allowed(i, c)` filters the
// transition weights (beam) or returns them (forward-backward).
template <typename Edge, typename Exit>
std::vector<std::size_t> sampleBackward(const BlockLattice& lat, const std::vector<double>& alpha, Edge&& edge,
                                        Exit&& exit, Rng& rng) {
  const std::size_t C = lat.columns();
  const std::size_t L = lat.length;
  std::vector<std::size_t> path(L);
  std::vector<double> w(C);
  for (std::size_t c = 0; c < C; ++c) w[c] = alpha[(L - 1) * C + c] * exit(c);
  path[L - 1] = rng.categorical(w);
  for (std::size_t l = L - 1; l-- > 0;) {
    const std::size_t next = path[l + 1];
    for (std::size_t c = 0; c < C; ++c) w[c] = alpha[l * C + c] * edge(l, c, next);
    path[l] = rng.categorical(w);
  }
  return path;
}

}  // namespace

double forwardBackwardLogDensity(const BlockLattice& lat, std::span<const std::size_t> columns) {
  if (columns.size() != lat.length) throw Error(ErrorCode::LengthMismatch, "path length differs from the block");
  const Forward f = forwardPass(lat);
  double lp = std::log(lat.left[columns[0]]);
  for (std::size_t l = 0; l < lat.length; ++l) {
    lp += std::log(lat.emission(l, columns[l]));
    if (l > 0) lp += std::log(lat.transition(columns[l - 1], columns[l]));
  }
  lp += std::log(lat.right[columns.back()]);
  return lp - f.logZ;
}

PathSample forwardBackwardSample(const BlockLattice& lat, Rng& rng) {
  const Forward f = forwardPass(lat);
  PathSample out;
  out.columns = sampleBackward(
      lat, f.alpha, [&](std::size_t, std::size_t c, std::size_t next) { return lat.transition(c, next); },
      [&](std::size_t c) { return lat.right[c]; }, rng);
  double lp = std::log(lat.left[out.columns[0]]);
  for (std::size_t l = 0; l < lat.length; ++l) {
    lp += std::log(lat.emission(l, out.columns[l]));
    if (l > 0) lp += std::log(lat.transition(out.columns[l - 1], out.columns[l]));
  }
  lp += std::log(lat.right[out.columns.back()]);
  out.logDensity = lp - f.logZ;
  return out;
}

std::vector<double> forwardBackwardMarginals(const BlockLattice& lat) {
  const std::size_t C = lat.columns();
  const std::size_t L = lat.length;
  const Forward f = forwardPass(lat);
  std::vector<double> beta(L * C);
  for (std::size_t c = 0; c < C; ++c) beta[(L - 1) * C + c] = lat.right[c];
  for (std::size_t l = L - 1; l-- > 0;) {
    double norm = 0.0;
    for (std::size_t i = 0; i < C; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < C; ++c) s += lat.transition(i, c) * lat.emission(l + 1, c) * beta[(l + 1) * C + c];
      beta[l * C + i] = s;
      norm += s;
    }
    for (std::size_t i = 0; i < C; ++i) beta[l * C + i] /= norm;
  }
  std::vector<double> out(L * C);
  for (std::size_t l = 0; l < L; ++l) {
    double norm = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      out[l * C + c] = f.alpha[l * C + c] * beta[l * C + c];
      norm += out[l * C + c];
    }
    for (std::size_t c = 0; c < C; ++c) out[l * C + c] /= norm;
  }
  return out;
}

PathSample beamSample(const BlockLattice& lat, std::span<const std::size_t> incumbent, Rng& rng) {
  const std::size_t C = lat.columns();
  const std::size_t L = lat.length;
  if (incumbent.size() != L) throw Error(ErrorCode::LengthMismatch, "incumbent length differs from the block");

  // slice levels: u[0] on the entry edge, u[l] on the edge into position l,
  // u[L] on the exit edge
  std::vector<double> u(L + 1);
  u[0] = rng.uniform() * lat.left[incumbent[0]];
  for (std::size_t l = 1; l < L; ++l) u[l] = rng.uniform() * lat.transition(incumbent[l - 1], incumbent[l]);
  u[L] = rng.uniform() * lat.right[incumbent[L - 1]];

  std::vector<double> alpha(L * C, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double* cur = &alpha[l * C];
    if (l == 0) {
      for (std::size_t c = 0; c < C; ++c) cur[c] = lat.left[c] > u[0] ? lat.emission(0, c) : 0.0;
    } else {
      const double* prev = &alpha[(l - 1) * C];
      for (std::size_t i = 0; i < C; ++i) {
        if (prev[i] == 0.0) continue;
        const double* row = &lat.trans[i * C];
        for (std::size_t c = 0; c < C; ++c)
          if (row[c] > u[l]) cur[c] += prev[i];
      }
      for (std::size_t c = 0; c < C; ++c) cur[c] *= lat.emission(l, c);
    }
    const double norm = std::accumulate(cur, cur + C, 0.0);
    if (!(norm > 0.0)) throw Error(ErrorCode::ZeroLikelihoodBlock, "sliced forward pass vanished");
    for (std::size_t c = 0; c < C; ++c) cur[c] /= norm;
  }

  PathSample out;
  out.columns = sampleBackward(
      lat, alpha,
      [&](std::size_t l, std::size_t c, std::size_t next) { return lat.transition(c, next) > u[l + 1] ? 1.0 : 0.0; },
      [&](std::size_t c) { return lat.right[c] > u[L] ? 1.0 : 0.0; }, rng);
  out.logDensity = forwardBackwardLogDensity(lat, out.columns);
  return out;
}

double newStateAssignmentLogProb(std::span<const DishId> labels, std::span<const bool> isNew, double gamma,
                                 DishId preseed) {
  std::vector<DishId> tableLabels;
  std::vector<double> tableCounts;
  if (preseed != kNewDish) {
    tableLabels.push_back(preseed);
    tableCounts.push_back(1.0);
  }
  double total = static_cast<double>(tableLabels.size());
  double lp = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!isNew[i]) continue;
    auto it = std::find(tableLabels.begin(), tableLabels.end(), labels[i]);
    if (it == tableLabels.end()) {
      lp += std::log(gamma / (total + gamma));
      tableLabels.push_back(labels[i]);
      tableCounts.push_back(1.0);
    } else {
      const auto k = static_cast<std::size_t>(it - tableLabels.begin());
      lp += std::log(tableCounts[k] / (total + gamma));
      tableCounts[k] += 1.0;
    }
    total += 1.0;
  }
  return lp;
}

namespace {

// Forward-backward (or beam) path over the served states plus NEW, then NEW
// occurrences labelled by a CRP over fresh labels.  The right boundary state
// seeds that CRP when it is no longer served, so a block may rejoin it.
class BlockProposal final : public RestrictedProposal {
 public:
  BlockProposal(const HmmState& h, std::size_t a, std::size_t b, BlockKernel kernel)
      : h_(h), a_(a), b_(b), kernel_(kernel), old_(h.x.begin() + static_cast<std::ptrdiff_t>(a),
                                                  h.x.begin() + static_cast<std::ptrdiff_t>(b)) {}

  Sample sample(std::span<Franchise* const>, Rng& rng) override {
    prepare();
    PathSample path = kernel_ == BlockKernel::Beam ? beamSample(lattice_, incumbent_, rng)
                                                   : forwardBackwardSample(lattice_, rng);
    std::vector<DishId> labels(lattice_.length);
    for (std::size_t l = 0; l < labels.size(); ++l)
      labels[l] = path.columns[l] == lattice_.newColumn() ? kNewDish : lattice_.states[path.columns[l]];
    const double assign = assignNewStates(
        std::span<DishId>(labels), h_.trans.gamma(), preseed_,
        [this](std::span<const DishId> exclude) { return h_.freshLabel(exclude); }, rng);
    Sample s;
    s.logDensity = path.logDensity + assign;
    for (std::size_t l = 0; l < labels.size(); ++l) {
      s.draws.push_back(labels[l]);
      s.draws.push_back(h_.y[a_ + l]);
    }
    if (b_ <= h_.length()) s.draws.push_back(h_.x[b_]);
    return s;
  }

  double logDensity(std::span<Franchise* const>, std::span<const DishId> draws) override {
    prepare();
    const double none = -std::numeric_limits<double>::infinity();
    const std::size_t L = lattice_.length;
    if (b_ <= h_.length() && draws[2 * L] != h_.x[b_]) return none;
    std::vector<DishId> labels(L);
    std::vector<std::size_t> columns(L);
    std::unique_ptr<bool[]> isNew(new bool[L]);
    for (std::size_t l = 0; l < L; ++l) {
      if (draws[2 * l + 1] != h_.y[a_ + l]) return none;
      labels[l] = draws[2 * l];
      if (labels[l] == kStartLabel || labels[l] == kNewDish) return none;
      columns[l] = lattice_.columnOf(labels[l]);
      isNew[l] = columns[l] == lattice_.newColumn();
    }
    return forwardBackwardLogDensity(lattice_, columns) +
           newStateAssignmentLogProb(labels, std::span<const bool>(isNew.get(), L), h_.trans.gamma(), preseed_);
  }

 private:
  void prepare() {
    if (prepared_) return;
    prepared_ = true;
    lattice_ = buildBlockLattice(h_, a_, b_);
    if (b_ <= h_.length() && !h_.trans.isSeen(h_.x[b_])) preseed_ = h_.x[b_];
    incumbent_.resize(old_.size());
    for (std::size_t l = 0; l < old_.size(); ++l) incumbent_[l] = lattice_.columnOf(old_[l]);
  }

  const HmmState& h_;
  std::size_t a_;
  std::size_t b_;
  BlockKernel kernel_;
  std::vector<DishId> old_;
  bool prepared_ = false;
  BlockLattice lattice_;
  DishId preseed_ = kNewDish;
  std::vector<std::size_t> incumbent_;
};

}  // namespace

RcdOutcome blockUpdate(HmmState& h, std::size_t a, std::size_t b, BlockKernel kernel, Rng& rng) {
  if (a < 1 || b <= a || b > h.length() + 1) throw Error(ErrorCode::InvalidArgument, "block outside 1..T");
  const DrawRequest req = detail::sequenceRequest(h, a, b);
  BlockProposal proposal(h, a, b, kernel);
  auto franchises = detail::franchisesOf(h);
  RcdOutcome out = rcdSample(franchises, req, proposal, rng);
  if (out.accepted) detail::writeBack(h, a, b, out.draws);
  return out;
}

SweepStats blockedSweep(HmmState& h, const BlockPlan& plan, BlockKernel kernel, Rng& rng) {
  std::vector<std::size_t> order(plan.blockCount());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  SweepStats stats;
  for (std::size_t i : order) {
    ++stats.trials;
    try {
      if (blockUpdate(h, plan.starts[i], plan.blockEnd(i), kernel, rng).accepted) ++stats.accepts;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroLikelihoodBlock) throw;
    }
  }
  return stats;
}

}  // namespace hcrp
