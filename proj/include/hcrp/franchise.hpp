#pragma once

// Two-level Chinese restaurant franchise in the compact representation: each
// restaurant keeps, per dish, the customer count of every table serving that
// dish, and the root keeps the number of tables serving each dish.  Which
// customer sits at which table is not stored; removal samples the table.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "hcrp/random.hpp"

namespace hcrp {

using DishId = std::uint32_t;
using RestaurantId = std::uint32_t;

/// Sentinel for "a dish not yet served anywhere" in queries and draws.
inline constexpr DishId kNewDish = std::numeric_limits<DishId>::max();

struct Table {
  DishId dish;
  int customers;
  bool operator==(const Table&) const = default;
};

/// All tables of one restaurant that serve one dish.
struct DishSeating {
  DishId dish = 0;
  int customers = 0;
  boost::container::small_vector<int, 4> tables;

  bool operator==(const DishSeating&) const = default;
};

class Restaurant {
 public:
  int customers() const { return customers_; }
  int tableCount() const { return tables_; }
  bool empty() const { return customers_ == 0; }

  const DishSeating* find(DishId k) const;
  int customersOf(DishId k) const;
  int tablesOf(DishId k) const;
  /// Seatings sorted by dish label.
  std::span<const DishSeating> dishes() const { return dishes_; }
  std::vector<Table> tables() const;

  bool operator==(const Restaurant&) const = default;

 private:
  friend class Franchise;

  DishSeating* findMutable(DishId k);
  DishSeating& ensure(DishId k);
  void erase(DishId k);

  std::vector<DishSeating> dishes_;
  int customers_ = 0;
  int tables_ = 0;
};

class Franchise;

/// Reversible record of count mutations.  Rolling back replays the entries in
/// reverse and leaves the franchise equal, field by field, to its state when
/// the log was empty.
class UndoLog {
 public:
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }
  void rollback(Franchise& f);

 private:
  friend class Franchise;

  enum class Op : std::uint8_t { JoinTable, OpenTable, LeaveTable, CloseTable };
  struct Entry {
    Op op;
    RestaurantId restaurant;
    DishId dish;
    std::uint32_t table;
  };

  std::vector<Entry> entries_;
};

class Franchise {
 public:
  /// A joint draw of (dish, table) from one restaurant.  `table` indexes the
  /// dish's tables, or is -1 for a new table.  `dish` is kNewDish when a dish
  /// never served before was drawn.
  struct Draw {
    DishId dish;
    int table;
    double logProb;
  };

  /// `baseSize == 0` selects a non-atomic base measure: the root hands out
  /// fresh labels.  `baseSize == V` selects the uniform base measure over the
  /// labels 0..V-1 (used for emissions over a finite alphabet).
  Franchise(double alpha, double gamma, std::size_t baseSize = 0);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  void setAlpha(double alpha);
  void setGamma(double gamma);
  std::size_t baseSize() const { return baseSize_; }
  bool finiteBase() const { return baseSize_ > 0; }

  const Restaurant& restaurant(RestaurantId j) const;
  /// Every non-empty restaurant has an id below this bound.
  std::size_t restaurantBound() const { return restaurants_.size(); }
  int rootTables(DishId k) const;
  int rootTotalTables() const { return rootTotal_; }
  /// Number of distinct dishes with at least one table.
  int dishCount() const { return dishCount_; }
  bool isSeen(DishId k) const { return rootTables(k) > 0; }
  /// Served dish labels, ascending.
  std::vector<DishId> dishes() const;
  long totalCustomers() const;

  /// Probability that a new table is assigned dish k.  With a non-atomic base
  /// and an unserved k this is the whole new-dish mass.
  double rootProb(DishId k) const;
  /// Predictive probability that the next customer of restaurant j eats k.
  /// For kNewDish, and for any k not served anywhere, the whole new-dish mass
  /// is returned (not a per-label share).
  double prob(RestaurantId j, DishId k) const;
  double newDishProb(RestaurantId j) const { return prob(j, kNewDish); }
  /// prob() for a restaurant with no customers.
  double probFromEmpty(DishId k) const;

  /// Joint probability of the next customer of j eating k at table `table`
  /// (an index into k's tables, or -1 for a new table).
  double jointProb(RestaurantId j, DishId k, int table) const;
  /// Probability that addCustomer(j, k) picks `table`.
  double tableProb(RestaurantId j, DishId k, int table) const;

  /// Seats a customer eating k in restaurant j; returns log of the
  /// table-choice probability.
  double addCustomer(RestaurantId j, DishId k, Rng& rng, UndoLog* log = nullptr);
  /// Removes a customer eating k from restaurant j, choosing the table in
  /// proportion to its occupancy.  Throws RemoveFromEmpty when j serves no k.
  void removeCustomer(RestaurantId j, DishId k, Rng& rng, UndoLog* log = nullptr);

  Draw drawDish(RestaurantId j, Rng& rng) const;
  /// Applies a draw, naming a new dish `label` when draw.dish is kNewDish.
  void seat(RestaurantId j, const Draw& draw, DishId label, UndoLog* log = nullptr);

  /// Log probability of the whole seating arrangement.
  double seatingLogProb() const;

  /// Smallest label >= from that is neither served nor used as a non-empty
  /// restaurant.
  DishId smallestUnusedDish(DishId from = 0) const;

  /// Recomputes every aggregate and throws AuditFailure on any mismatch.
  void audit() const;

  bool operator==(const Franchise& other) const;

  /// Line-oriented snapshot: hyperparameters followed by one
  /// `table <restaurant> <dish> <customers>` line per table.
  void write(std::ostream& out) const;
  static Franchise read(std::istream& in);

 private:
  friend class UndoLog;

  Restaurant& restaurantMutable(RestaurantId j);
  void rootIncrement(DishId k);
  void rootDecrement(DishId k);

  void joinTable(RestaurantId j, DishId k, std::size_t t);
  void leaveTable(RestaurantId j, DishId k, std::size_t t);
  void openTable(RestaurantId j, DishId k);
  void closeTable(RestaurantId j, DishId k, std::size_t t);
  void reopenTable(RestaurantId j, DishId k, std::size_t t);

  double alpha_;
  double gamma_;
  std::size_t baseSize_;
  std::vector<Restaurant> restaurants_;
  std::vector<int> rootTables_;
  int rootTotal_ = 0;
  int dishCount_ = 0;
};

}  // namespace hcrp
