#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "hcrp/franchise.hpp"

namespace testing {

// Franchise from snapshot lines, e.g. {"table 0 1 2", "table 0 2 1"}.
inline hcrp::Franchise franchiseFrom(double alpha, double gamma, std::size_t base,
                                     std::initializer_list<const char*> tables) {
  std::ostringstream s;
  s << "# hcrp-franchise v1\nalpha " << alpha << "\ngamma " << gamma << "\nbase " << base << "\n";
  for (const char* t : tables) s << t << '\n';
  std::istringstream in(s.str());
  return hcrp::Franchise::read(in);
}

// |observed - expected| within k binomial standard deviations.
inline bool withinSigma(long hits, long trials, double p, double k = 3.0) {
  const double n = static_cast<double>(trials);
  const double sd = std::sqrt(n * p * (1.0 - p));
  return std::abs(static_cast<double>(hits) - n * p) <= k * sd + 1e-9;
}

}  // namespace testing
