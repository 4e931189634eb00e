#include "hcrp/franchise.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "hcrp/error.hpp"

namespace hcrp {

namespace {

const Restaurant kEmptyRestaurant{};

bool lessDish(const DishSeating& s, DishId k) { return s.dish < k; }

}  // namespace

// ---------------------------------------------------------------- Restaurant

const DishSeating* Restaurant::find(DishId k) const {
  auto it = std::lower_bound(dishes_.begin(), dishes_.end(), k, lessDish);
  if (it == dishes_.end() || it->dish != k) return nullptr;
  return &*it;
}

DishSeating* Restaurant::findMutable(DishId k) {
  return const_cast<DishSeating*>(std::as_const(*this).find(k));
}

int Restaurant::customersOf(DishId k) const {
  const DishSeating* s = find(k);
  return s ? s->customers : 0;
}

int Restaurant::tablesOf(DishId k) const {
  const DishSeating* s = find(k);
  return s ? static_cast<int>(s->tables.size()) : 0;
}

std::vector<Table> Restaurant::tables() const {
  std::vector<Table> out;
  out.reserve(static_cast<std::size_t>(tables_));
  for (const auto& s : dishes_)
    for (int n : s.tables) out.push_back({s.dish, n});
  return out;
}

DishSeating& Restaurant::ensure(DishId k) {
  auto it = std::lower_bound(dishes_.begin(), dishes_.end(), k, lessDish);
  if (it != dishes_.end() && it->dish == k) return *it;
  it = dishes_.insert(it, DishSeating{});
  it->dish = k;
  return *it;
}

void Restaurant::erase(DishId k) {
  auto it = std::lower_bound(dishes_.begin(), dishes_.end(), k, lessDish);
  if (it != dishes_.end() && it->dish == k) dishes_.erase(it);
}

// ------------------------------------------------------------------- UndoLog

void UndoLog::rollback(Franchise& f) {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    switch (it->op) {
      case Op::JoinTable: f.leaveTable(it->restaurant, it->dish, it->table); break;
      case Op::OpenTable: f.closeTable(it->restaurant, it->dish, it->table); break;
      case Op::LeaveTable: f.joinTable(it->restaurant, it->dish, it->table); break;
      case Op::CloseTable: f.reopenTable(it->restaurant, it->dish, it->table); break;
    }
  }
  entries_.clear();
}

// ----------------------------------------------------------------- Franchise

Franchise::Franchise(double alpha, double gamma, std::size_t baseSize)
    : alpha_(alpha), gamma_(gamma), baseSize_(baseSize) {
  setAlpha(alpha);
  setGamma(gamma);
}

void Franchise::setAlpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::InvalidArgument, "concentration alpha must be positive");
  alpha_ = alpha;
}

void Franchise::setGamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidArgument, "concentration gamma must be positive");
  gamma_ = gamma;
}

const Restaurant& Franchise::restaurant(RestaurantId j) const {
  return j < restaurants_.size() ? restaurants_[j] : kEmptyRestaurant;
}

Restaurant& Franchise::restaurantMutable(RestaurantId j) {
  if (j == kNewDish) throw Error(ErrorCode::InvalidArgument, "restaurant id is the NEW sentinel");
  if (j >= restaurants_.size()) restaurants_.resize(std::size_t{j} + 1);
  return restaurants_[j];
}

int Franchise::rootTables(DishId k) const {
  return k < rootTables_.size() ? rootTables_[k] : 0;
}

std::vector<DishId> Franchise::dishes() const {
  std::vector<DishId> out;
  out.reserve(static_cast<std::size_t>(dishCount_));
  for (std::size_t k = 0; k < rootTables_.size(); ++k)
    if (rootTables_[k] > 0) out.push_back(static_cast<DishId>(k));
  return out;
}

long Franchise::totalCustomers() const {
  long n = 0;
  for (const auto& r : restaurants_) n += r.customers();
  return n;
}

void Franchise::rootIncrement(DishId k) {
  if (k >= rootTables_.size()) rootTables_.resize(std::size_t{k} + 1, 0);
  if (rootTables_[k]++ == 0) ++dishCount_;
  ++rootTotal_;
}

void Franchise::rootDecrement(DishId k) {
  if (--rootTables_[k] == 0) --dishCount_;
  --rootTotal_;
}

double Franchise::rootProb(DishId k) const {
  const double denom = rootTotal_ + gamma_;
  if (finiteBase()) {
    if (k >= baseSize_) return 0.0;
    return (rootTables(k) + gamma_ / static_cast<double>(baseSize_)) / denom;
  }
  const int m = k == kNewDish ? 0 : rootTables(k);
  return m > 0 ? m / denom : gamma_ / denom;
}

double Franchise::prob(RestaurantId j, DishId k) const {
  const Restaurant& r = restaurant(j);
  const double denom = r.customers() + alpha_;
  if (finiteBase()) {
    if (k >= baseSize_) return 0.0;
    return (r.customersOf(k) + alpha_ * rootProb(k)) / denom;
  }
  if (k == kNewDish || rootTables(k) == 0) return alpha_ * rootProb(kNewDish) / denom;
  return (r.customersOf(k) + alpha_ * rootProb(k)) / denom;
}

double Franchise::probFromEmpty(DishId k) const { return rootProb(k); }

double Franchise::jointProb(RestaurantId j, DishId k, int table) const {
  const Restaurant& r = restaurant(j);
  const double denom = r.customers() + alpha_;
  if (table >= 0) {
    const DishSeating* s = r.find(k);
    if (!s || table >= static_cast<int>(s->tables.size())) return 0.0;
    return s->tables[static_cast<std::size_t>(table)] / denom;
  }
  return alpha_ / denom * rootProb(k);
}

double Franchise::tableProb(RestaurantId j, DishId k, int table) const {
  const DishSeating* s = restaurant(j).find(k);
  if (!finiteBase() && rootTables(k) == 0) return table < 0 ? 1.0 : 0.0;
  const double newWeight = alpha_ * rootProb(k);
  const double total = (s ? s->customers : 0) + newWeight;
  if (table < 0) return newWeight / total;
  if (!s || table >= static_cast<int>(s->tables.size())) return 0.0;
  return s->tables[static_cast<std::size_t>(table)] / total;
}

// Primitive mutations.  None of them log; the public operations record the
// entries so rollback can replay the inverse primitive.

void Franchise::joinTable(RestaurantId j, DishId k, std::size_t t) {
  Restaurant& r = restaurantMutable(j);
  DishSeating* s = r.findMutable(k);
  ++s->tables[t];
  ++s->customers;
  ++r.customers_;
}

void Franchise::leaveTable(RestaurantId j, DishId k, std::size_t t) {
  Restaurant& r = restaurantMutable(j);
  DishSeating* s = r.findMutable(k);
  --s->tables[t];
  --s->customers;
  --r.customers_;
}

void Franchise::openTable(RestaurantId j, DishId k) {
  reopenTable(j, k, restaurant(j).tablesOf(k));
}

void Franchise::closeTable(RestaurantId j, DishId k, std::size_t t) {
  Restaurant& r = restaurantMutable(j);
  DishSeating* s = r.findMutable(k);
  s->tables.erase(s->tables.begin() + static_cast<std::ptrdiff_t>(t));
  --s->customers;
  --r.customers_;
  --r.tables_;
  rootDecrement(k);
  if (s->tables.empty()) r.erase(k);
}

void Franchise::reopenTable(RestaurantId j, DishId k, std::size_t t) {
  Restaurant& r = restaurantMutable(j);
  DishSeating& s = r.ensure(k);
  s.tables.insert(s.tables.begin() + static_cast<std::ptrdiff_t>(t), 1);
  ++s.customers;
  ++r.customers_;
  ++r.tables_;
  rootIncrement(k);
}

double Franchise::addCustomer(RestaurantId j, DishId k, Rng& rng, UndoLog* log) {
  if (k == kNewDish || (finiteBase() && k >= baseSize_))
    throw Error(ErrorCode::InvalidArgument, "addCustomer needs a concrete dish label");
  const Restaurant& r = restaurant(j);
  const DishSeating* s = r.find(k);
  if (!finiteBase() && rootTables(k) == 0) {
    openTable(j, k);
    if (log) log->entries_.push_back({UndoLog::Op::OpenTable, j, k, 0});
    return 0.0;
  }
  const double newWeight = alpha_ * rootProb(k);
  const int existing = s ? s->customers : 0;
  const double total = existing + newWeight;
  if (s) {
    double u = rng.uniform() * total;
    for (std::size_t t = 0; t < s->tables.size(); ++t) {
      const int n = s->tables[t];
      if (u < n) {
        joinTable(j, k, t);
        if (log) log->entries_.push_back({UndoLog::Op::JoinTable, j, k, static_cast<std::uint32_t>(t)});
        return std::log(n / total);
      }
      u -= n;
    }
  }
  const auto t = static_cast<std::uint32_t>(r.tablesOf(k));
  openTable(j, k);
  if (log) log->entries_.push_back({UndoLog::Op::OpenTable, j, k, t});
  return existing == 0 ? 0.0 : std::log(newWeight / total);
}

void Franchise::removeCustomer(RestaurantId j, DishId k, Rng& rng, UndoLog* log) {
  const DishSeating* s = restaurant(j).find(k);
  if (!s) {
    throw Error(ErrorCode::RemoveFromEmpty, "restaurant " + std::to_string(j) +
                                                " has no customer eating dish " + std::to_string(k));
  }
  auto pick = static_cast<int>(rng.below(static_cast<std::size_t>(s->customers)));
  std::size_t t = 0;
  for (; t < s->tables.size(); ++t) {
    if (pick < s->tables[t]) break;
    pick -= s->tables[t];
  }
  if (s->tables[t] == 1) {
    closeTable(j, k, t);
    if (log) log->entries_.push_back({UndoLog::Op::CloseTable, j, k, static_cast<std::uint32_t>(t)});
  } else {
    leaveTable(j, k, t);
    if (log) log->entries_.push_back({UndoLog::Op::LeaveTable, j, k, static_cast<std::uint32_t>(t)});
  }
}

Franchise::Draw Franchise::drawDish(RestaurantId j, Rng& rng) const {
  const Restaurant& r = restaurant(j);
  const double denom = r.customers() + alpha_;
  double u = rng.uniform() * denom;
  for (const auto& s : r.dishes()) {
    if (u >= s.customers) {
      u -= s.customers;
      continue;
    }
    for (std::size_t t = 0; t < s.tables.size(); ++t) {
      if (u < s.tables[t])
        return {s.dish, static_cast<int>(t), std::log(s.tables[t] / denom)};
      u -= s.tables[t];
    }
    // rounding inside the dish: take its last table
    return {s.dish, static_cast<int>(s.tables.size()) - 1, std::log(s.tables.back() / denom)};
  }

  const double logNewTable = std::log(alpha_ / denom);
  const double rootDenom = rootTotal_ + gamma_;
  double v = rng.uniform() * rootDenom;
  if (finiteBase()) {
    const double share = gamma_ / static_cast<double>(baseSize_);
    DishId last = 0;
    for (DishId y = 0; y < baseSize_; ++y) {
      const double w = rootTables(y) + share;
      if (v < w) return {y, -1, logNewTable + std::log(w / rootDenom)};
      v -= w;
      last = y;
    }
    return {last, -1, logNewTable + std::log((rootTables(last) + share) / rootDenom)};
  }
  for (std::size_t k = 0; k < rootTables_.size(); ++k) {
    const int m = rootTables_[k];
    if (m == 0) continue;
    if (v < m) return {static_cast<DishId>(k), -1, logNewTable + std::log(m / rootDenom)};
    v -= m;
  }
  return {kNewDish, -1, logNewTable + std::log(gamma_ / rootDenom)};
}

void Franchise::seat(RestaurantId j, const Draw& draw, DishId label, UndoLog* log) {
  const DishId k = draw.dish == kNewDish ? label : draw.dish;
  if (k == kNewDish) throw Error(ErrorCode::InvalidArgument, "seat needs a label for a new dish");
  if (draw.table >= 0) {
    joinTable(j, k, static_cast<std::size_t>(draw.table));
    if (log) log->entries_.push_back({UndoLog::Op::JoinTable, j, k, static_cast<std::uint32_t>(draw.table)});
  } else {
    const auto t = static_cast<std::uint32_t>(restaurant(j).tablesOf(k));
    openTable(j, k);
    if (log) log->entries_.push_back({UndoLog::Op::OpenTable, j, k, t});
  }
}

double Franchise::seatingLogProb() const {
  double lp = 0.0;
  const double lgAlpha = std::lgamma(alpha_);
  const double logAlpha = std::log(alpha_);
  for (const auto& r : restaurants_) {
    if (r.empty()) continue;
    lp += lgAlpha - std::lgamma(alpha_ + r.customers()) + r.tableCount() * logAlpha;
    for (const auto& s : r.dishes())
      for (int n : s.tables) lp += std::lgamma(static_cast<double>(n));
  }
  if (rootTotal_ == 0) return lp;
  lp += std::lgamma(gamma_) - std::lgamma(gamma_ + rootTotal_);
  if (finiteBase()) {
    const double share = gamma_ / static_cast<double>(baseSize_);
    const double lgShare = std::lgamma(share);
    for (int m : rootTables_)
      if (m > 0) lp += std::lgamma(m + share) - lgShare;
  } else {
    lp += dishCount_ * std::log(gamma_);
    for (int m : rootTables_)
      if (m > 0) lp += std::lgamma(static_cast<double>(m));
  }
  return lp;
}

DishId Franchise::smallestUnusedDish(DishId from) const {
  DishId k = from;
  while (rootTables(k) > 0 || !restaurant(k).empty()) ++k;
  return k;
}

void Franchise::audit() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::AuditFailure, what); };
  std::vector<int> root(rootTables_.size(), 0);
  for (std::size_t j = 0; j < restaurants_.size(); ++j) {
    const Restaurant& r = restaurants_[j];
    int customers = 0;
    int tables = 0;
    DishId previous = 0;
    bool first = true;
    for (const auto& s : r.dishes()) {
      if (!first && s.dish <= previous) fail("restaurant " + std::to_string(j) + ": dishes out of order");
      first = false;
      previous = s.dish;
      if (s.tables.empty()) fail("restaurant " + std::to_string(j) + ": dish entry without tables");
      if (finiteBase() && s.dish >= baseSize_) fail("dish outside the base alphabet");
      int n = 0;
      for (int c : s.tables) {
        if (c < 1) fail("restaurant " + std::to_string(j) + ": table with no customers");
        n += c;
      }
      if (n != s.customers) fail("restaurant " + std::to_string(j) + ": per-dish customer count");
      customers += n;
      tables += static_cast<int>(s.tables.size());
      if (s.dish >= root.size()) fail("dish missing from the root");
      root[s.dish] += static_cast<int>(s.tables.size());
    }
    if (customers != r.customers()) fail("restaurant " + std::to_string(j) + ": total customers");
    if (tables != r.tableCount()) fail("restaurant " + std::to_string(j) + ": total tables");
  }
  int total = 0;
  int count = 0;
  for (std::size_t k = 0; k < root.size(); ++k) {
    if (root[k] != rootTables_[k]) fail("root table count of dish " + std::to_string(k));
    total += root[k];
    if (root[k] > 0) ++count;
  }
  if (total != rootTotal_) fail("root total tables");
  if (count != dishCount_) fail("root dish count");
}

bool Franchise::operator==(const Franchise& other) const {
  if (alpha_ != other.alpha_ || gamma_ != other.gamma_ || baseSize_ != other.baseSize_) return false;
  if (rootTotal_ != other.rootTotal_ || dishCount_ != other.dishCount_) return false;
  const std::size_t nr = std::max(restaurants_.size(), other.restaurants_.size());
  for (std::size_t j = 0; j < nr; ++j) {
    const auto id = static_cast<RestaurantId>(j);
    if (!(restaurant(id) == other.restaurant(id))) return false;
  }
  const std::size_t nk = std::max(rootTables_.size(), other.rootTables_.size());
  for (std::size_t k = 0; k < nk; ++k) {
    const auto id = static_cast<DishId>(k);
    if (rootTables(id) != other.rootTables(id)) return false;
  }
  return true;
}

void Franchise::write(std::ostream& out) const {
  out << "# hcrp-franchise v1\n" << std::setprecision(17);
  out << "alpha " << alpha_ << "\ngamma " << gamma_ << "\nbase " << baseSize_ << "\n";
  for (std::size_t j = 0; j < restaurants_.size(); ++j)
    for (const auto& s : restaurants_[j].dishes())
      for (int n : s.tables) out << "table " << j << ' ' << s.dish << ' ' << n << '\n';
}

Franchise Franchise::read(std::istream& in) {
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t base = 0;
  bool haveAlpha = false;
  bool haveGamma = false;
  struct Row {
    RestaurantId j;
    DishId k;
    int n;
  };
  std::vector<Row> rows;
  std::string line;
  int lineNo = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::Parse, "franchise snapshot line " + std::to_string(lineNo) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "alpha") {
      if (!(ls >> alpha)) fail("bad alpha");
      haveAlpha = true;
    } else if (key == "gamma") {
      if (!(ls >> gamma)) fail("bad gamma");
      haveGamma = true;
    } else if (key == "base") {
      if (!(ls >> base)) fail("bad base size");
    } else if (key == "table") {
      long long j = -1, k = -1, n = 0;
      if (!(ls >> j >> k >> n) || j < 0 || k < 0 || n < 1 || j >= kNewDish || k >= kNewDish)
        fail("expected: table <restaurant> <dish> <customers>");
      rows.push_back({static_cast<RestaurantId>(j), static_cast<DishId>(k), static_cast<int>(n)});
    } else {
      fail("unknown record '" + key + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing text");
  }
  if (!haveAlpha || !haveGamma) throw Error(ErrorCode::Parse, "franchise snapshot lacks alpha/gamma");
  Franchise f(alpha, gamma, base);
  for (const Row& row : rows) {
    if (f.finiteBase() && row.k >= base) throw Error(ErrorCode::Parse, "dish outside the base alphabet");
    Restaurant& r = f.restaurantMutable(row.j);
    DishSeating& s = r.ensure(row.k);
    s.tables.push_back(row.n);
    s.customers += row.n;
    r.customers_ += row.n;
    ++r.tables_;
    f.rootIncrement(row.k);
  }
  f.audit();
  return f;
}

}  // namespace hcrp
