#include "hcrp/rcd.hpp"

#include <algorithm>

#include "hcrp/error.hpp"

namespace hcrp {

double predictiveFactor(const Franchise& f, RestaurantId j, DishId k, int table) {
  return f.jointProb(j, k, table) / f.tableProb(j, k, table);
}

RcdOutcome rcdSample(std::span<Franchise* const> franchises, const DrawRequest& request,
                     RestrictedProposal& proposal, Rng& rng) {
  const std::size_t L = request.length();
  if (request.oldDraws.size() != L)
    throw Error(ErrorCode::InvalidArgument, "draw request: old draws and slots differ in length");
  for (std::size_t f : request.franchiseOf)
    if (f >= franchises.size()) throw Error(ErrorCode::InvalidArgument, "draw request: bad franchise index");

  std::vector<UndoLog> logs(franchises.size());
  const std::span<const DishId> oldDraws(request.oldDraws);

  double logOld = 0.0;
  for (std::size_t l = L; l-- > 0;) {
    Franchise& f = *franchises[request.franchiseOf[l]];
    const RestaurantId j = request.restaurant(l, oldDraws);
    f.removeCustomer(j, oldDraws[l], rng, &logs[request.franchiseOf[l]]);
    logOld += std::log(f.prob(j, oldDraws[l]));
  }

  auto rollbackAll = [&] {
    for (std::size_t i = franchises.size(); i-- > 0;) logs[i].rollback(*franchises[i]);
  };

  double qOld = 0.0;
  RestrictedProposal::Sample proposed;
  try {
    qOld = proposal.logDensity(franchises, oldDraws);
    if (qOld == -std::numeric_limits<double>::infinity())
      throw Error(ErrorCode::ProposalOutsideRestriction, "old draws have zero proposal density");
    proposed = proposal.sample(franchises, rng);
    if (proposed.draws.size() != L)
      throw Error(ErrorCode::InvalidArgument, "proposal returned the wrong number of draws");
  } catch (...) {
    rollbackAll();
    throw;
  }
  const std::span<const DishId> newDraws(proposed.draws);

  double logNew = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    Franchise& f = *franchises[request.franchiseOf[l]];
    const RestaurantId j = request.restaurant(l, newDraws);
    logNew += std::log(f.prob(j, newDraws[l]));
    f.addCustomer(j, newDraws[l], rng, &logs[request.franchiseOf[l]]);
  }

  RcdOutcome out;
  out.logRatio = qOld - proposed.logDensity + logNew - logOld;
  out.acceptProb = out.logRatio >= 0.0 ? 1.0 : std::exp(out.logRatio);
  out.accepted = std::log(rng.uniformPositive()) < out.logRatio;
  if (out.accepted) {
    out.draws = std::move(proposed.draws);
  } else {
    rollbackAll();
    out.draws = request.oldDraws;
  }
  return out;
}

}  // namespace hcrp
