#pragma once

// HCRP-HMM state.  Positions run 1..T; x[0] is the fixed start label and
// y[0] is unused.  The transition franchise has one restaurant per source
// state and non-atomic root; the emission franchise has one restaurant per
// state and a uniform base over the alphabet.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "hcrp/franchise.hpp"
#include "hcrp/random.hpp"

namespace hcrp {

using Symbol = std::uint32_t;

inline constexpr DishId kStartLabel = 0;

struct Hyperparameters {
  double alpha = 1.0;
  double gamma = 1.0;
  double alphaEmit = 1.0;
  double gammaEmit = 1.0;
};

/// Predictive transition and emission probabilities over the served states
/// plus one aggregate NEW state (the last row/column).
struct PredictiveMatrix {
  std::vector<DishId> states;
  std::size_t alphabet = 0;
  std::vector<double> trans;  // (K+1) x (K+1), row-major
  std::vector<double> emit;   // (K+1) x alphabet, row-major; empty if not built

  std::size_t size() const { return states.size() + 1; }
  double transition(std::size_t from, std::size_t to) const { return trans[from * size() + to]; }
  double emission(std::size_t state, Symbol y) const { return emit[state * alphabet + y]; }
};

class HmmState {
 public:
  /// Empty model over `alphabet` symbols with no observations.
  HmmState(std::size_t alphabet, const Hyperparameters& hp);
  /// Observations y_1..y_T, not yet seated.  Call assign() before sampling.
  HmmState(std::span<const Symbol> observations, std::size_t alphabet, const Hyperparameters& hp);

  std::size_t length() const { return x.size() - 1; }
  std::size_t alphabet() const { return emit.baseSize(); }
  int numStates() const { return trans.dishCount(); }

  Hyperparameters hyperparameters() const;
  void setHyperparameters(const Hyperparameters& hp);

  /// Re-seats every customer for the hidden path states[0..T-1] (positions
  /// 1..T) from scratch.
  void assign(std::span<const DishId> states, Rng& rng);

  /// Appends one position: draws the next state and symbol from the
  /// predictive and seats both.  Returns the log probability of the draws.
  double extend(Rng& rng);

  /// Samples T positions from an empty model; returns the accumulated log
  /// probability of all draws.
  double generate(std::size_t T, Rng& rng);

  double jointLogProb() const { return trans.seatingLogProb() + emit.seatingLogProb(); }

  PredictiveMatrix buildPredictive(bool withEmissions = true) const;

  /// Smallest label >= 1 not served, not used as a restaurant in either
  /// franchise, and not in `exclude`.
  DishId freshLabel(std::span<const DishId> exclude = {}) const;

  /// Franchise audits plus a check that restaurant-level customer counts
  /// match the (x, y) sequences.
  void audit() const;

  /// Checkpoint: header, hyperparameters, x and y, then both franchise
  /// snapshots.
  void write(std::ostream& out) const;
  static HmmState read(std::istream& in);

  std::vector<DishId> x;
  std::vector<Symbol> y;
  Franchise trans;
  Franchise emit;
};

}  // namespace hcrp
