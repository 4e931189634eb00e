#include "hcrp/hmm.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "hcrp/error.hpp"

namespace hcrp {

HmmState::HmmState(std::size_t alphabet, const Hyperparameters& hp)
    : x{kStartLabel},
      y{0},
      trans(hp.alpha, hp.gamma, 0),
      emit(hp.alphaEmit, hp.gammaEmit, alphabet) {
  if (alphabet == 0) throw Error(ErrorCode::InvalidArgument, "alphabet must not be empty");
}

HmmState::HmmState(std::span<const Symbol> observations, std::size_t alphabet, const Hyperparameters& hp)
    : HmmState(alphabet, hp) {
  for (Symbol s : observations) {
    if (s >= alphabet) throw Error(ErrorCode::InvalidArgument, "observation outside the alphabet");
    y.push_back(s);
  }
  x.assign(y.size(), kStartLabel);
}

Hyperparameters HmmState::hyperparameters() const {
  return {trans.alpha(), trans.gamma(), emit.alpha(), emit.gamma()};
}

void HmmState::setHyperparameters(const Hyperparameters& hp) {
  trans.setAlpha(hp.alpha);
  trans.setGamma(hp.gamma);
  emit.setAlpha(hp.alphaEmit);
  emit.setGamma(hp.gammaEmit);
}

void HmmState::assign(std::span<const DishId> states, Rng& rng) {
  if (states.size() != length())
    throw Error(ErrorCode::LengthMismatch, "hidden path length differs from the observations");
  trans = Franchise(trans.alpha(), trans.gamma(), 0);
  emit = Franchise(emit.alpha(), emit.gamma(), emit.baseSize());
  for (std::size_t t = 1; t <= length(); ++t) {
    const DishId k = states[t - 1];
    if (k == kStartLabel || k == kNewDish)
      throw Error(ErrorCode::InvalidArgument, "hidden labels must be positive");
    x[t] = k;
    trans.addCustomer(x[t - 1], k, rng);
    emit.addCustomer(k, y[t], rng);
  }
}

double HmmState::extend(Rng& rng) {
  const DishId prev = x.back();
  const Franchise::Draw d = trans.drawDish(prev, rng);
  const DishId k = d.dish == kNewDish ? freshLabel() : d.dish;
  trans.seat(prev, d, k);
  const Franchise::Draw e = emit.drawDish(k, rng);
  emit.seat(k, e, e.dish);
  x.push_back(k);
  y.push_back(e.dish);
  return d.logProb + e.logProb;
}

double HmmState::generate(std::size_t T, Rng& rng) {
  if (length() != 0 || trans.rootTotalTables() != 0 || emit.rootTotalTables() != 0)
    throw Error(ErrorCode::InvalidArgument, "generate needs an empty model");
  double lp = 0.0;
  for (std::size_t t = 0; t < T; ++t) lp += extend(rng);
  return lp;
}

PredictiveMatrix HmmState::buildPredictive(bool withEmissions) const {
  PredictiveMatrix pm;
  pm.states = trans.dishes();
  pm.alphabet = alphabet();
  const std::size_t n = pm.size();
  const std::size_t K = n - 1;
  pm.trans.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < K; ++c)
      pm.trans[i * n + c] = i < K ? trans.prob(pm.states[i], pm.states[c]) : trans.probFromEmpty(pm.states[c]);
    pm.trans[i * n + K] = i < K ? trans.newDishProb(pm.states[i]) : trans.probFromEmpty(kNewDish);
  }
  if (withEmissions) {
    pm.emit.resize(n * pm.alphabet);
    for (std::size_t i = 0; i < n; ++i)
      for (Symbol s = 0; s < pm.alphabet; ++s)
        pm.emit[i * pm.alphabet + s] = i < K ? emit.prob(pm.states[i], s) : emit.probFromEmpty(s);
  }
  return pm;
}

DishId HmmState::freshLabel(std::span<const DishId> exclude) const {
  DishId k = 1;
  for (;;) {
    k = trans.smallestUnusedDish(k);
    const bool taken = !emit.restaurant(k).empty() ||
                       std::find(exclude.begin(), exclude.end(), k) != exclude.end();
    if (!taken) return k;
    ++k;
  }
}

void HmmState::audit() const {
  trans.audit();
  emit.audit();
  if (x.size() != y.size() || x.empty() || x[0] != kStartLabel)
    throw Error(ErrorCode::AuditFailure, "malformed hidden/observed sequences");
  std::map<std::pair<DishId, DishId>, int> transCounts;
  std::map<std::pair<DishId, Symbol>, int> emitCounts;
  for (std::size_t t = 1; t < x.size(); ++t) {
    ++transCounts[{x[t - 1], x[t]}];
    ++emitCounts[{x[t], y[t]}];
  }
  if (trans.totalCustomers() != static_cast<long>(length()) ||
      emit.totalCustomers() != static_cast<long>(length()))
    throw Error(ErrorCode::AuditFailure, "customer totals differ from the sequence length");
  for (const auto& [key, n] : transCounts)
    if (trans.restaurant(key.first).customersOf(key.second) != n)
      throw Error(ErrorCode::AuditFailure, "transition counts differ from the hidden path at state " +
                                               std::to_string(key.first));
  for (const auto& [key, n] : emitCounts)
    if (emit.restaurant(key.first).customersOf(key.second) != n)
      throw Error(ErrorCode::AuditFailure, "emission counts differ from the hidden path at state " +
                                               std::to_string(key.first));
}

void HmmState::write(std::ostream& out) const {
  out << "# hcrp-hmm v1\nalphabet " << alphabet() << "\nx";
  for (std::size_t t = 1; t < x.size(); ++t) out << ' ' << x[t];
  out << "\ny";
  for (std::size_t t = 1; t < y.size(); ++t) out << ' ' << y[t];
  out << "\n[trans]\n";
  trans.write(out);
  out << "[emit]\n";
  emit.write(out);
}

HmmState HmmState::read(std::istream& in) {
  std::string line;
  std::size_t alphabet = 0;
  std::vector<DishId> xs;
  std::vector<Symbol> ys;
  std::ostringstream transText;
  std::ostringstream emitText;
  std::ostringstream* section = nullptr;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line == "[trans]") {
      section = &transText;
      continue;
    }
    if (line == "[emit]") {
      section = &emitText;
      continue;
    }
    if (section) {
      *section << line << '\n';
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "alphabet") {
      ls >> alphabet;
    } else if (key == "x") {
      for (DishId v; ls >> v;) xs.push_back(v);
    } else if (key == "y") {
      for (Symbol v; ls >> v;) ys.push_back(v);
    } else {
      throw Error(ErrorCode::Parse, "hmm checkpoint line " + std::to_string(lineNo) + ": unknown record '" + key + "'");
    }
  }
  if (xs.size() != ys.size()) throw Error(ErrorCode::Parse, "hmm checkpoint: x and y lengths differ");
  std::istringstream ts(transText.str());
  std::istringstream es(emitText.str());
  Franchise trans = Franchise::read(ts);
  Franchise emit = Franchise::read(es);
  if (emit.baseSize() != alphabet || trans.finiteBase())
    throw Error(ErrorCode::Parse, "hmm checkpoint: franchise base measures do not match");
  HmmState h(ys, alphabet, {trans.alpha(), trans.gamma(), emit.alpha(), emit.gamma()});
  for (std::size_t t = 0; t < xs.size(); ++t) h.x[t + 1] = xs[t];
  h.trans = std::move(trans);
  h.emit = std::move(emit);
  h.audit();
  return h;
}

}  // namespace hcrp
