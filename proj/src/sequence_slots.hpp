#pragma once

#include <array>
#include <span>

#include "hcrp/hmm.hpp"
#include "hcrp/rcd.hpp"

namespace hcrp::detail {

inline constexpr std::size_t kTransFranchise = 0;
inline constexpr std::size_t kEmitFranchise = 1;

// Slots for positions [a, b): x_a, y_a, x_{a+1}, y_{a+1}, ..., x_{b-1},
// y_{b-1}, then x_b when b <= T.  Each transition slot is served by the
// restaurant of the draw before it.
inline DrawRequest sequenceRequest(const HmmState& h, std::size_t a, std::size_t b) {
  DrawRequest req;
  const std::size_t L = b - a;
  const bool tail = b <= h.length();
  req.franchiseOf.reserve(2 * L + 1);
  req.oldDraws.reserve(2 * L + 1);
  for (std::size_t t = a; t < b; ++t) {
    req.franchiseOf.push_back(kTransFranchise);
    req.franchiseOf.push_back(kEmitFranchise);
    req.oldDraws.push_back(h.x[t]);
    req.oldDraws.push_back(h.y[t]);
  }
  if (tail) {
    req.franchiseOf.push_back(kTransFranchise);
    req.oldDraws.push_back(h.x[b]);
  }
  const DishId left = h.x[a - 1];
  req.restaurant = [left](std::size_t slot, std::span<const DishId> draws) -> RestaurantId {
    if (slot == 0) return left;
    // emission slots sit right after their state; transitions after an emission
    return (slot % 2 == 1) ? draws[slot - 1] : draws[slot - 2];
  };
  return req;
}

inline void writeBack(HmmState& h, std::size_t a, std::size_t b, std::span<const DishId> draws) {
  for (std::size_t t = a; t < b; ++t) h.x[t] = draws[2 * (t - a)];
}

inline std::array<Franchise*, 2> franchisesOf(HmmState& h) { return {&h.trans, &h.emit}; }

}  // namespace hcrp::detail
