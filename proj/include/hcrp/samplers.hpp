#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hcrp/hmm.hpp"
#include "hcrp/random.hpp"
#include "hcrp/rcd.hpp"

namespace hcrp {

struct SweepStats {
  long accepts = 0;
  long trials = 0;

  double rate() const { return trials > 0 ? static_cast<double>(accepts) / static_cast<double>(trials) : 0.0; }
  SweepStats& operator+=(const SweepStats& o) {
    accepts += o.accepts;
    trials += o.trials;
    return *this;
  }
};

// ------------------------------------------------------------ step-wise Gibbs

/// Resamples x_t (1 <= t <= T) with one restricted collapsed draw over the
/// transition into t, the emission at t and the transition out of t.
RcdOutcome stepwiseGibbsUpdate(HmmState& h, std::size_t t, Rng& rng);
SweepStats stepwiseGibbsSweep(HmmState& h, Rng& rng);

// ----------------------------------------------------------- block proposals

/// Blocks are [starts[i], starts[i+1]) with the last one ending at T+1.
struct BlockPlan {
  std::vector<std::size_t> starts;
  std::size_t length = 0;

  std::size_t blockCount() const { return starts.size(); }
  std::size_t blockEnd(std::size_t i) const { return i + 1 < starts.size() ? starts[i + 1] : length + 1; }
};

/// First block size uniform in [1, target], later sizes uniform over
/// {target-1, target, target+1}; a target of 1 gives single positions.
BlockPlan drawBlockPlan(std::size_t T, std::size_t target, Rng& rng);

/// Predictive quantities for resampling positions [a, b) on the state with
/// the block's customers removed.  Column K (= states.size()) is NEW.
struct BlockLattice {
  std::vector<DishId> states;
  std::size_t length = 0;
  std::vector<double> left;   // C: from the state before the block
  std::vector<double> right;  // C: into the state after the block (1 if none)
  std::vector<double> trans;  // C x C
  std::vector<double> emit;   // length x C

  std::size_t columns() const { return states.size() + 1; }
  std::size_t newColumn() const { return states.size(); }
  double transition(std::size_t from, std::size_t to) const { return trans[from * columns() + to]; }
  double emission(std::size_t l, std::size_t c) const { return emit[l * columns() + c]; }
  /// Column of a label; NEW for labels not served.
  std::size_t columnOf(DishId label) const;
};

BlockLattice buildBlockLattice(const HmmState& h, std::size_t a, std::size_t b);

struct PathSample {
  std::vector<std::size_t> columns;
  double logDensity = 0.0;
};

/// Forward filtering, backward sampling.  Throws ZeroLikelihoodBlock when
/// the forward pass vanishes.
PathSample forwardBackwardSample(const BlockLattice& lat, Rng& rng);
double forwardBackwardLogDensity(const BlockLattice& lat, std::span<const std::size_t> columns);
/// Exact per-position marginals, length x C.
std::vector<double> forwardBackwardMarginals(const BlockLattice& lat);

/// One slice-sampling step started from `incumbent`: slice levels are drawn
/// under the incumbent's transition probabilities (including both block
/// boundaries) and a path is drawn from the sliced lattice.  The returned
/// density is the forward-backward density of the drawn path, against which
/// the slice kernel is reversible.
PathSample beamSample(const BlockLattice& lat, std::span<const std::size_t> incumbent, Rng& rng);

/// Replaces each kNewDish in `labels` with a draw from a CRP over fresh
/// labels with concentration `gamma`.  When `preseed` is not kNewDish the
/// CRP starts with one customer at that label.  `fresh(exclude)` must return
/// an unused label outside `exclude`.  Returns the log probability of the
/// assignment.
template <typename FreshLabel>
double assignNewStates(std::span<DishId> labels, double gamma, DishId preseed, FreshLabel&& fresh, Rng& rng);

/// Log probability that the CRP above produced the labels at the positions
/// flagged in `isNew`.
double newStateAssignmentLogProb(std::span<const DishId> labels, std::span<const bool> isNew, double gamma,
                                 DishId preseed);

enum class BlockKernel { ForwardBackward, Beam };

/// One restricted collapsed draw over positions [a, b).
RcdOutcome blockUpdate(HmmState& h, std::size_t a, std::size_t b, BlockKernel kernel, Rng& rng);
SweepStats blockedSweep(HmmState& h, const BlockPlan& plan, BlockKernel kernel, Rng& rng);

// --------------------------------------------------------------- split-merge

struct SplitMergeOptions {
  bool earlyStop = true;
};

struct SplitMergeOutcome {
  bool split = false;
  bool accepted = false;
  bool stoppedEarly = false;
  std::size_t fragments = 0;
  double logRatio = 0.0;
};

/// One split-merge move with anchors drawn uniformly.  Needs T >= 2.
SplitMergeOutcome splitMergeMove(HmmState& h, Rng& rng, const SplitMergeOptions& options = {});
/// The same move with given anchors (distinct positions) and acceptance
/// threshold in (0, 1).
SplitMergeOutcome splitMergeAt(HmmState& h, std::size_t t1, std::size_t t2, double threshold, Rng& rng,
                               const SplitMergeOptions& options = {});

// ----------------------------------------------------------- hyperparameters

struct CrpCounts {
  int customers;
  int tables;
};

/// One auxiliary-variable update of a concentration shared by the given
/// restaurants, under a Gamma(1, 1) prior.
double sampleConcentration(std::span<const CrpCounts> restaurants, double current, Rng& rng);

/// Updates all four concentrations; with `tie` the transition and emission
/// franchises share alpha and gamma.
void resampleHyperparameters(HmmState& h, Rng& rng, bool tie = false);

// ----------------------------------------------------------- particle filter

struct ParticleFilterInit {
  std::vector<DishId> states;  // positions 1..T
  int warnings = 0;
};

/// Bootstrap filter over the HCRP-HMM prior: transitions are drawn from the
/// particle's predictive, weighted by the emission predictive, resampled
/// every step.  Returns the path of one particle drawn by final weight.
ParticleFilterInit particleFilterInit(std::span<const Symbol> y, std::size_t alphabet, const Hyperparameters& hp,
                                      std::size_t particles, Rng& rng);

struct ParticleFilterEval {
  std::vector<double> likelihoods;  // one-step predictive of each test symbol
  int warnings = 0;
};

/// Fully adapted filter that absorbs `test` into copies of `model`.  The
/// particles start at `start`, or at the last hidden state of the model when
/// `start` is kNewDish.
ParticleFilterEval particleFilterEval(const HmmState& model, std::span<const Symbol> test, std::size_t particles,
                                      Rng& rng, DishId start = kNewDish);

// ------------------------------------------------------------ sweep driver

enum class SamplerKind { StepwiseGibbs, StepwiseSlice, BlockedGibbs, Beam };

SamplerKind parseSamplerKind(const std::string& name);
const char* samplerKindName(SamplerKind kind);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::StepwiseGibbs;
  std::size_t blockSize = 8;
  int splitMergePerSweep = 0;
  bool resampleHyperparameters = true;
  bool tieHyperparameters = false;
};

struct SweepReport {
  SweepStats gibbs;
  SweepStats splitMerge;
};

/// One sweep of the configured kernel, then the split-merge moves, then the
/// hyperparameter update.
SweepReport runSweep(HmmState& h, const SamplerConfig& config, Rng& rng);

// ------------------------------------------------------------------ inline

template <typename FreshLabel>
double assignNewStates(std::span<DishId> labels, double gamma, DishId preseed, FreshLabel&& fresh, Rng& rng) {
  std::vector<DishId> tableLabels;
  std::vector<double> tableCounts;
  if (preseed != kNewDish) {
    tableLabels.push_back(preseed);
    tableCounts.push_back(1.0);
  }
  double total = static_cast<double>(tableLabels.size());
  double lp = 0.0;
  std::vector<double> weights;
  for (DishId& label : labels) {
    if (label != kNewDish) continue;
    weights = tableCounts;
    weights.push_back(gamma);
    const std::size_t pick = rng.categorical(weights, total + gamma);
    lp += std::log(weights[pick] / (total + gamma));
    if (pick == tableLabels.size()) {
      label = fresh(std::span<const DishId>(tableLabels));
      tableLabels.push_back(label);
      tableCounts.push_back(1.0);
    } else {
      label = tableLabels[pick];
      tableCounts[pick] += 1.0;
    }
    total += 1.0;
  }
  return lp;
}

}  // namespace hcrp
