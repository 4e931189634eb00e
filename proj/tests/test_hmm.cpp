#include <doctest.h>

#include <sstream>

#include "hcrp/error.hpp"
#include "hcrp/hmm.hpp"

using namespace hcrp;

TEST_CASE("empty model predictive is a single NEW state") {
  HmmState h(3, {});
  const auto pm = h.buildPredictive();
  CHECK(pm.size() == 1);
  CHECK(pm.transition(0, 0) == doctest::Approx(1.0));
  for (Symbol s = 0; s < 3; ++s) CHECK(pm.emission(0, s) == doctest::Approx(1.0 / 3.0));
  CHECK(h.jointLogProb() == 0.0);
}

TEST_CASE("generation") {
  Rng rng(1);
  SUBCASE("zero length") {
    HmmState h(2, {});
    CHECK(h.generate(0, rng) == 0.0);
    CHECK(h.length() == 0);
  }
  SUBCASE("first state is new") {
    HmmState h(2, {});
    h.generate(1, rng);
    CHECK(h.numStates() == 1);
    CHECK(h.x[1] != kStartLabel);
  }
  SUBCASE("long run keeps the counts consistent") {
    HmmState h(4, {0.8, 1.5, 1.0, 2.0});
    const double lp = h.generate(1000, rng);
    h.audit();
    CHECK(h.jointLogProb() == doctest::Approx(lp).epsilon(1e-9));
    const double before = h.jointLogProb();
    const double step = h.extend(rng);
    CHECK(step < 0.0);
    CHECK(h.jointLogProb() < before);
    CHECK(h.jointLogProb() == doctest::Approx(before + step).epsilon(1e-9));
  }
}

TEST_CASE("predictive matrix entries are franchise predictives") {
  Rng rng(2);
  HmmState h(3, {1.3, 0.7, 1.0, 1.0});
  h.generate(200, rng);
  const auto pm = h.buildPredictive();
  const std::size_t K = pm.states.size();
  for (std::size_t i = 0; i < K; ++i) {
    double rowSum = 0.0;
    for (std::size_t c = 0; c <= K; ++c) rowSum += pm.transition(i, c);
    CHECK(rowSum == doctest::Approx(1.0));
    for (std::size_t c = 0; c < K; ++c)
      CHECK(pm.transition(i, c) == h.trans.prob(pm.states[i], pm.states[c]));
    CHECK(pm.transition(i, K) == h.trans.newDishProb(pm.states[i]));
    for (Symbol s = 0; s < 3; ++s) CHECK(pm.emission(i, s) == h.emit.prob(pm.states[i], s));
  }
}

TEST_CASE("assignment from a path") {
  Rng rng(3);
  const std::vector<Symbol> y{0, 1, 1, 0, 2};
  HmmState h(y, 3, {});
  const std::vector<DishId> path{1, 2, 2, 1, 3};
  h.assign(path, rng);
  h.audit();
  CHECK(h.numStates() == 3);
  CHECK(h.trans.restaurant(kStartLabel).customersOf(1) == 1);
  CHECK(h.emit.restaurant(2).customersOf(1) == 2);
  CHECK(h.freshLabel() == 4);
  const std::vector<DishId> taken{4, 5};
  CHECK(h.freshLabel(taken) == 6);
  const std::vector<DishId> shortPath{1, 2};
  CHECK_THROWS_AS(h.assign(shortPath, rng), Error);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(4);
  HmmState h(5, {1.1, 2.2, 0.3, 0.4});
  h.generate(300, rng);
  std::stringstream s;
  h.write(s);
  const HmmState g = HmmState::read(s);
  g.audit();
  CHECK(g.x == h.x);
  CHECK(g.y == h.y);
  CHECK(g.trans == h.trans);
  CHECK(g.emit == h.emit);
  CHECK(g.hyperparameters().gammaEmit == doctest::Approx(0.4));
  CHECK(g.jointLogProb() == doctest::Approx(h.jointLogProb()));
}

TEST_CASE("malformed checkpoint is rejected") {
  std::istringstream in("# hcrp-hmm v1\nalphabet two\n");
  CHECK_THROWS_AS(HmmState::read(in), Error);
}
