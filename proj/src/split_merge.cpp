#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "hcrp/error.hpp"
#include "hcrp/samplers.hpp"

namespace hcrp {

namespace {

struct Fragment {
  std::size_t first;
  std::size_t last;
};

// Sequential state of one split-merge move.  Customers are removed and added
// through the undo logs; the running ratio collects log r factors and the
// proposal densities.
class Move {
 public:
  Move(HmmState& h, Rng& rng) : h_(h), rng_(rng), oldX_(h.x) {}

  void remove(RestaurantId j, DishId k, Franchise& f, UndoLog& log) {
    f.removeCustomer(j, k, rng_, &log);
    logRatio_ -= std::log(f.prob(j, k));
  }

  void add(RestaurantId j, DishId k, Franchise& f, UndoLog& log) {
    logRatio_ += std::log(f.prob(j, k));
    f.addCustomer(j, k, rng_, &log);
  }

  void removeTrans(std::size_t t) { remove(h_.x[t - 1], h_.x[t], h_.trans, transLog_); }
  void addTrans(std::size_t t) { add(h_.x[t - 1], h_.x[t], h_.trans, transLog_); }
  void removeEmit(std::size_t t) { remove(h_.x[t], h_.y[t], h_.emit, emitLog_); }
  void addEmit(std::size_t t) { add(h_.x[t], h_.y[t], h_.emit, emitLog_); }

  void addLogDensityOld(double lq) { logRatio_ += lq; }
  void addLogDensityNew(double lq) { logRatio_ -= lq; }
  double logRatio() const { return logRatio_; }

  void restore() {
    emitLog_.rollback(h_.emit);
    transLog_.rollback(h_.trans);
    h_.x = oldX_;
  }

 private:
  HmmState& h_;
  Rng& rng_;
  std::vector<DishId> oldX_;
  UndoLog transLog_;
  UndoLog emitLog_;
  double logRatio_ = 0.0;
};

// Two-label lattice over a fragment on the current state; the NEW column is
// closed off.
BlockLattice limitedLattice(const HmmState& h, const Fragment& frag, DishId u, DishId v) {
  BlockLattice lat;
  lat.states = {std::min(u, v), std::max(u, v)};
  lat.length = frag.last - frag.first + 1;
  const std::size_t C = 3;
  const Franchise& tr = h.trans;
  const Franchise& em = h.emit;
  const DishId left = h.x[frag.first - 1];
  lat.left.assign(C, 0.0);
  lat.right.assign(C, 0.0);
  lat.trans.assign(C * C, 0.0);
  lat.emit.assign(lat.length * C, 0.0);
  const bool hasRight = frag.last < h.length();
  for (std::size_t c = 0; c < 2; ++c) {
    const DishId k = lat.states[c];
    lat.left[c] = tr.prob(left, k);
    lat.right[c] = hasRight ? tr.prob(k, h.x[frag.last + 1]) : 1.0;
    for (std::size_t d = 0; d < 2; ++d) lat.trans[c * C + d] = tr.prob(k, lat.states[d]);
    for (std::size_t l = 0; l < lat.length; ++l) lat.emit[l * C + c] = em.prob(k, h.y[frag.first + l]);
  }
  return lat;
}

double limitedLogDensity(const HmmState& h, const Fragment& frag, DishId u, DishId v) {
  const BlockLattice lat = limitedLattice(h, frag, u, v);
  std::vector<std::size_t> columns(lat.length);
  for (std::size_t l = 0; l < lat.length; ++l) columns[l] = h.x[frag.first + l] == lat.states[0] ? 0 : 1;
  return forwardBackwardLogDensity(lat, columns);
}

}  // namespace

SplitMergeOutcome splitMergeAt(HmmState& h, std::size_t t1, std::size_t t2, double threshold, Rng& rng,
                               const SplitMergeOptions& options) {
  const std::size_t T = h.length();
  if (T < 2 || t1 < 1 || t2 < 1 || t1 > T || t2 > T || t1 == t2)
    throw Error(ErrorCode::InvalidArgument, "split-merge needs two distinct anchors in 1..T");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(ErrorCode::InvalidArgument, "split-merge threshold must lie in (0, 1)");
  const double logThreshold = std::log(threshold);

  const DishId a = h.x[t1];
  const DishId b = h.x[t2];
  SplitMergeOutcome out;
  out.split = a == b;

  std::vector<Fragment> fragments;
  std::vector<bool> inFragment(T + 2, false);
  for (std::size_t t = 1; t <= T; ++t) {
    if (t == t1 || t == t2 || (h.x[t] != a && h.x[t] != b)) continue;
    if (t > 1 && inFragment[t - 1])
      fragments.back().last = t;
    else
      fragments.push_back({t, t});
    inFragment[t] = true;
  }
  rng.shuffle(fragments.begin(), fragments.end());
  out.fragments = fragments.size();

  const bool transIn = !inFragment[t2 - 1];
  const bool transOut = t2 < T && !inFragment[t2 + 1];

  Move move(h, rng);

  // Remove in the reverse of the allocation order.  For a merge, the split
  // that would recreate the old labels allocates fragment i on exactly the
  // state left after removing it, so its density is taken there.
  for (std::size_t i = fragments.size(); i-- > 0;) {
    const Fragment& f = fragments[i];
    if (f.last < T) move.removeTrans(f.last + 1);
    for (std::size_t t = f.last + 1; t-- > f.first;) {
      move.removeEmit(t);
      move.removeTrans(t);
    }
    if (!out.split) move.addLogDensityOld(limitedLogDensity(h, f, a, b));
  }
  if (transOut) move.removeTrans(t2 + 1);
  if (transIn) move.removeTrans(t2);
  move.removeEmit(t2);

  // The anchor goes first, then fragments in order.  Past this point every
  // factor of a merge is a probability, so its ratio only falls.
  const DishId fresh = out.split ? h.freshLabel() : a;
  h.x[t2] = fresh;
  auto stop = [&] {
    return !out.split && options.earlyStop && move.logRatio() < logThreshold;
  };

  bool stopped = false;
  auto step = [&](auto&& op) {
    if (stopped) return;
    op();
    if (stop()) stopped = true;
  };
  step([&] { move.addEmit(t2); });
  if (transIn) step([&] { move.addTrans(t2); });
  if (transOut) step([&] { move.addTrans(t2 + 1); });

  for (const Fragment& f : fragments) {
    if (stopped) break;
    if (out.split) {
      const BlockLattice lat = limitedLattice(h, f, a, fresh);
      const PathSample path = forwardBackwardSample(lat, rng);
      move.addLogDensityNew(path.logDensity);
      for (std::size_t l = 0; l < lat.length; ++l) h.x[f.first + l] = lat.states[path.columns[l]];
    } else {
      for (std::size_t t = f.first; t <= f.last; ++t) h.x[t] = a;
    }
    for (std::size_t t = f.first; t <= f.last; ++t) {
      step([&] { move.addTrans(t); });
      step([&] { move.addEmit(t); });
    }
    if (f.last < T) step([&] { move.addTrans(f.last + 1); });
  }

  out.logRatio = move.logRatio();
  out.stoppedEarly = stopped;
  out.accepted = !stopped && logThreshold < out.logRatio;
  if (!out.accepted) move.restore();
  return out;
}

SplitMergeOutcome splitMergeMove(HmmState& h, Rng& rng, const SplitMergeOptions& options) {
  const std::size_t T = h.length();
  if (T < 2) throw Error(ErrorCode::InvalidArgument, "split-merge needs at least two positions");
  const double threshold = rng.uniformPositive();
  const std::size_t t1 = 1 + rng.below(T);
  std::size_t t2 = 1 + rng.below(T - 1);
  if (t2 >= t1) ++t2;
  return splitMergeAt(h, t1, t2, threshold, rng, options);
}

}  // namespace hcrp
