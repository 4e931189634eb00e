#include <algorithm>
#include <numeric>

#include "hcrp/error.hpp"
#include "hcrp/samplers.hpp"

namespace hcrp {

namespace {

struct Particle {
  Franchise trans;
  Franchise emit;
  DishId last;
};

DishId freshLabel(const Particle& p) {
  DishId k = 1;
  for (;;) {
    k = p.trans.smallestUnusedDish(k);
    if (p.emit.restaurant(k).empty()) return k;
    ++k;
  }
}

// Multinomial resampling.  Ancestors come back sorted so each selected
// particle is moved once and copied for its other offspring.
std::vector<std::size_t> resample(std::vector<Particle>& particles, const std::vector<double>& weights, Rng& rng) {
  const std::size_t Z = particles.size();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> ancestors(Z);
  for (auto& a : ancestors) a = rng.categorical(weights, total);
  std::sort(ancestors.begin(), ancestors.end());
  std::vector<Particle> next;
  next.reserve(Z);
  for (std::size_t i = 0; i < Z; ++i) {
    if (i > 0 && ancestors[i] == ancestors[i - 1])
      next.push_back(next.back());
    else
      next.push_back(std::move(particles[ancestors[i]]));
  }
  particles = std::move(next);
  return ancestors;
}

// Replaces all-zero weights by uniform ones; returns true when it had to.
bool rescueWeights(std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total > 0.0) return false;
  std::fill(weights.begin(), weights.end(), 1.0);
  return true;
}

}  // namespace

ParticleFilterInit particleFilterInit(std::span<const Symbol> y, std::size_t alphabet, const Hyperparameters& hp,
                                      std::size_t particles, Rng& rng) {
  if (particles == 0) throw Error(ErrorCode::InvalidArgument, "particle count must be positive");
  const std::size_t T = y.size();
  const std::size_t Z = particles;
  ParticleFilterInit out;
  if (T == 0) return out;

  std::vector<Particle> ps(Z, Particle{Franchise(hp.alpha, hp.gamma, 0),
                                       Franchise(hp.alphaEmit, hp.gammaEmit, alphabet), kStartLabel});
  std::vector<DishId> labels(T * Z);
  std::vector<std::size_t> parents(T * Z);
  std::vector<double> weights(Z, 1.0);

  for (std::size_t t = 0; t < T; ++t) {
    if (y[t] >= alphabet) throw Error(ErrorCode::InvalidArgument, "observation outside the alphabet");
    if (t > 0) {
      const auto ancestors = resample(ps, weights, rng);
      std::copy(ancestors.begin(), ancestors.end(), parents.begin() + static_cast<std::ptrdiff_t>(t * Z));
    }
    for (std::size_t z = 0; z < Z; ++z) {
      Particle& p = ps[z];
      const Franchise::Draw d = p.trans.drawDish(p.last, rng);
      const DishId k = d.dish == kNewDish ? freshLabel(p) : d.dish;
      weights[z] = p.emit.prob(k, y[t]);
      p.trans.seat(p.last, d, k);
      p.emit.addCustomer(k, y[t], rng);
      p.last = k;
      labels[t * Z + z] = k;
    }
    if (rescueWeights(weights)) ++out.warnings;
  }

  std::size_t z = rng.categorical(weights);
  out.states.resize(T);
  for (std::size_t t = T; t-- > 0;) {
    out.states[t] = labels[t * Z + z];
    if (t > 0) z = parents[t * Z + z];
  }
  return out;
}

ParticleFilterEval particleFilterEval(const HmmState& model, std::span<const Symbol> test, std::size_t particles,
                                      Rng& rng, DishId start) {
  if (particles == 0) throw Error(ErrorCode::InvalidArgument, "particle count must be positive");
  const std::size_t Z = particles;
  const DishId from = start == kNewDish ? model.x.back() : start;
  std::vector<Particle> ps(Z, Particle{model.trans, model.emit, from});
  ParticleFilterEval out;
  out.likelihoods.reserve(test.size());

  std::vector<double> lik(Z);
  std::vector<std::vector<DishId>> candidates(Z);
  std::vector<std::vector<double>> candidateWeights(Z);
  for (Symbol s : test) {
    if (s >= model.alphabet()) throw Error(ErrorCode::InvalidArgument, "test symbol outside the alphabet");
    for (std::size_t z = 0; z < Z; ++z) {
      const Particle& p = ps[z];
      auto& labels = candidates[z];
      auto& w = candidateWeights[z];
      labels = p.trans.dishes();
      w.resize(labels.size() + 1);
      for (std::size_t i = 0; i < labels.size(); ++i) w[i] = p.trans.prob(p.last, labels[i]) * p.emit.prob(labels[i], s);
      w.back() = p.trans.newDishProb(p.last) * p.emit.probFromEmpty(s);
      labels.push_back(kNewDish);
      lik[z] = std::accumulate(w.begin(), w.end(), 0.0);
    }
    out.likelihoods.push_back(std::accumulate(lik.begin(), lik.end(), 0.0) / static_cast<double>(Z));
    if (rescueWeights(lik)) ++out.warnings;
    const auto ancestors = resample(ps, lik, rng);
    for (std::size_t z = 0; z < Z; ++z) {
      Particle& p = ps[z];
      const auto& w = candidateWeights[ancestors[z]];
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      DishId k = total > 0.0 ? candidates[ancestors[z]][rng.categorical(w, total)] : kNewDish;
      if (k == kNewDish) k = freshLabel(p);
      p.trans.addCustomer(p.last, k, rng);
      p.emit.addCustomer(k, s, rng);
      p.last = k;
    }
  }
  return out;
}

}  // namespace hcrp
