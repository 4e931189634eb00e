#include <algorithm>
#include <cmath>
#include <limits>

#include "hcrp/samplers.hpp"

namespace hcrp {

namespace {

// Gamma(shape, rate) posterior accumulated from auxiliary variables; starts
// at the Gamma(1, 1) prior.
struct GammaPosterior {
  double shape = 1.0;
  double rate = 1.0;
};

double logBeta(double a, double b, Rng& rng) {
  const double w = rng.beta(a, b);
  return std::log(std::max(w, std::numeric_limits<double>::min()));
}

// Γ(c)/Γ(c+n)·c^m: w ~ Beta(c+1, n), s ~ Bernoulli(n/(n+c)).
void addRestaurant(GammaPosterior& post, int customers, int tables, double current, Rng& rng) {
  if (customers <= 0) return;
  const double n = customers;
  post.rate -= logBeta(current + 1.0, n, rng);
  const bool s = rng.bernoulli(n / (n + current));
  post.shape += tables - (s ? 1.0 : 0.0);
}

// Root over a finite uniform base: Γ(c)/Γ(c+m)·Π_y Γ(m_y + c/V)/Γ(c/V).  The
// rising factorials get one Bernoulli per table.
void addFiniteRoot(GammaPosterior& post, const Franchise& f, double current, Rng& rng) {
  const int m = f.rootTotalTables();
  if (m == 0) return;
  post.rate -= logBeta(current + 1.0, m, rng);
  if (rng.bernoulli(m / (m + current))) post.shape -= 1.0;
  const double share = current / static_cast<double>(f.baseSize());
  for (DishId y = 0; y < f.baseSize(); ++y) {
    const int my = f.rootTables(y);
    for (int i = 0; i < my; ++i)
      if (i == 0 || rng.bernoulli(share / (share + i))) post.shape += 1.0;
  }
}

void addRestaurants(GammaPosterior& post, const Franchise& f, double current, Rng& rng) {
  for (std::size_t j = 0; j < f.restaurantBound(); ++j) {
    const Restaurant& r = f.restaurant(static_cast<RestaurantId>(j));
    addRestaurant(post, r.customers(), r.tableCount(), current, rng);
  }
}

}  // namespace

double sampleConcentration(std::span<const CrpCounts> restaurants, double current, Rng& rng) {
  GammaPosterior post;
  for (const CrpCounts& c : restaurants) addRestaurant(post, c.customers, c.tables, current, rng);
  return rng.gamma(post.shape, post.rate);
}

void resampleHyperparameters(HmmState& h, Rng& rng, bool tie) {
  Franchise& tr = h.trans;
  Franchise& em = h.emit;
  if (tie) {
    GammaPosterior a;
    addRestaurants(a, tr, tr.alpha(), rng);
    addRestaurants(a, em, tr.alpha(), rng);
    const double alpha = rng.gamma(a.shape, a.rate);
    GammaPosterior g;
    addRestaurant(g, tr.rootTotalTables(), tr.dishCount(), tr.gamma(), rng);
    addFiniteRoot(g, em, tr.gamma(), rng);
    const double gamma = rng.gamma(g.shape, g.rate);
    h.setHyperparameters({alpha, gamma, alpha, gamma});
    return;
  }
  GammaPosterior a;
  addRestaurants(a, tr, tr.alpha(), rng);
  GammaPosterior g;
  addRestaurant(g, tr.rootTotalTables(), tr.dishCount(), tr.gamma(), rng);
  GammaPosterior ae;
  addRestaurants(ae, em, em.alpha(), rng);
  GammaPosterior ge;
  addFiniteRoot(ge, em, em.gamma(), rng);
  Hyperparameters hp;
  hp.alpha = rng.gamma(a.shape, a.rate);
  hp.gamma = rng.gamma(g.shape, g.rate);
  hp.alphaEmit = rng.gamma(ae.shape, ae.rate);
  hp.gammaEmit = rng.gamma(ge.shape, ge.rate);
  h.setHyperparameters(hp);
}

}  // namespace hcrp
