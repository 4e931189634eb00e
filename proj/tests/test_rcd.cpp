#include <doctest.h>

#include <array>

#include "hcrp/error.hpp"
#include "hcrp/rcd.hpp"
#include "proposals.hpp"
#include "support.hpp"

using namespace hcrp;

namespace {

Franchise randomFranchise(Rng& rng, std::size_t base = 0) {
  Franchise f(0.2 + 3 * rng.uniform(), 0.2 + 3 * rng.uniform(), base);
  const int n = 1 + static_cast<int>(rng.below(40));
  for (int i = 0; i < n; ++i)
    f.addCustomer(static_cast<RestaurantId>(rng.below(4)), static_cast<DishId>(rng.below(base ? base : 6)), rng);
  return f;
}

}  // namespace

TEST_CASE("predictive factor equals the predictive for every table case") {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const Franchise f = randomFranchise(rng, trial % 2 ? 4 : 0);
    for (RestaurantId j = 0; j < 4; ++j)
      for (DishId k : f.dishes()) {
        const int tables = f.restaurant(j).tablesOf(k);
        for (int t = -1; t < tables; ++t) CHECK(std::abs(predictiveFactor(f, j, k, t) - f.prob(j, k)) < 1e-12);
      }
  }
}

TEST_CASE("ratio accumulator") {
  RatioAccumulator none;
  CHECK(none.ratio() == 1.0);
  RatioAccumulator pair;
  pair.multiply(2.0);
  pair.multiply(0.5);
  CHECK(pair.ratio() == doctest::Approx(1.0));

  RatioAccumulator acc(0.3);
  const double factors[] = {0.9, 0.8, 0.7, 0.6, 0.5};
  double partial = 1.0;
  int firstBelow = -1;
  for (int i = 0; i < 5; ++i) {
    partial *= factors[i];
    if (firstBelow < 0 && partial < 0.3) firstBelow = i;
  }
  int flagged = -1;
  for (int i = 0; i < 5 && flagged < 0; ++i) {
    acc.multiply(factors[i]);
    if (acc.belowThreshold()) flagged = i;
  }
  CHECK(firstBelow == 4);
  CHECK(flagged == firstBelow);
}

TEST_CASE("single draw from the predictive is always accepted") {
  Rng rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    Franchise f = randomFranchise(rng);
    const auto j = static_cast<RestaurantId>(rng.below(4));
    if (f.restaurant(j).empty()) continue;
    DrawRequest req;
    req.franchiseOf = {0};
    req.restaurant = [j](std::size_t, std::span<const DishId>) { return j; };
    req.oldDraws = {f.restaurant(j).dishes()[rng.below(f.restaurant(j).dishes().size())].dish};
    testing::PredictiveProposal q(req);
    std::array<Franchise*, 1> fs{&f};
    const auto out = rcdSample(fs, req, q, rng);
    CHECK(out.acceptProb == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.accepted);
    f.audit();
  }
}

TEST_CASE("rejected draws leave both franchises untouched") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    Franchise a = randomFranchise(rng);
    Franchise b = randomFranchise(rng, 5);
    std::array<Franchise*, 2> fs{&a, &b};
    DrawRequest req;
    const std::size_t L = 1 + rng.below(4);
    for (std::size_t l = 0; l < L; ++l) req.franchiseOf.push_back(rng.below(2));
    req.restaurant = [](std::size_t slot, std::span<const DishId> draws) {
      return slot == 0 ? RestaurantId{0} : static_cast<RestaurantId>(draws[slot - 1] % 3);
    };
    // seat the old draws first
    for (std::size_t l = 0; l < L; ++l) {
      Franchise& f = *fs[req.franchiseOf[l]];
      const auto j = req.restaurant(l, req.oldDraws);
      const DishId k = static_cast<DishId>(rng.below(f.finiteBase() ? f.baseSize() : 6));
      f.addCustomer(j, k, rng);
      req.oldDraws.push_back(k);
    }
    const Franchise a0 = a;
    const Franchise b0 = b;
    testing::RejectingProposal q(req);
    const auto out = rcdSample(fs, req, q, rng);
    CHECK_FALSE(out.accepted);
    CHECK(out.draws == req.oldDraws);
    CHECK(a == a0);
    CHECK(b == b0);
  }
}

TEST_CASE("zero proposal density for the old draws is reported") {
  class Nowhere final : public RestrictedProposal {
   public:
    Sample sample(std::span<Franchise* const>, Rng&) override { return {{1}, 0.0}; }
    double logDensity(std::span<Franchise* const>, std::span<const DishId>) override {
      return -std::numeric_limits<double>::infinity();
    }
  };
  Rng rng(4);
  Franchise f = testing::franchiseFrom(1, 1, 0, {"table 0 1 2", "table 0 2 1"});
  const Franchise before = f;
  DrawRequest req;
  req.franchiseOf = {0};
  req.restaurant = [](std::size_t, std::span<const DishId>) { return RestaurantId{0}; };
  req.oldDraws = {1};
  Nowhere q;
  std::array<Franchise*, 1> fs{&f};
  try {
    rcdSample(fs, req, q, rng);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProposalOutsideRestriction);
  }
  CHECK(f == before);
}
