#ifndef CASCADE_CASCADE_CORE_HPP
#define CASCADE_CASCADE_CORE_HPP

// The cascade click model: problem instances, ranked actions, round sampling
// and the two per-round regret metrics.
//
// Item ids are 1-based everywhere in the public interface.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/rng.hpp"

namespace cascade {

/// Raised when an instance cannot be constructed from the given parameters.
class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using ItemId = int;

/// Ordered list of K distinct item ids.
struct Action {
  std::vector<ItemId> items;

  std::size_t size() const noexcept { return items.size(); }
  ItemId operator[](std::size_t k) const { return items[k]; }
  friend bool operator==(const Action&, const Action&) = default;
};

namespace detail {

// Products and sums over values sorted descending, so that equal multisets
// give bit-identical results regardless of the order they were played in.
inline double no_click_product(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  double prod = 1.0;
  for (double w : values) prod *= (1.0 - w);
  return prod;
}

inline double attraction_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  double sum = 0.0;
  for (double w : values) sum += w;
  return sum;
}

}  // namespace detail

/// An (L, K, w) problem. Immutable once built; the optimal action and its
/// no-click probability are computed at construction.
class Instance {
 public:
  Instance(int list_size, std::vector<double> attraction)
      : list_size_(list_size), attraction_(std::move(attraction)) {
    const int num_items = static_cast<int>(attraction_.size());
    if (num_items < 1) throw InstanceError("instance needs at least one item (L >= 1)");
    if (list_size_ < 1 || list_size_ > num_items) {
      throw InstanceError("list size must satisfy 1 <= K <= L (K=" + std::to_string(list_size_) +
                          ", L=" + std::to_string(num_items) + ")");
    }
    for (int e = 0; e < num_items; ++e) {
      const double w = attraction_[e];
      if (!(w >= 0.0 && w <= 1.0)) {
        throw InstanceError("attraction of item " + std::to_string(e + 1) +
                            " must lie in [0,1], got " + std::to_string(w));
      }
    }
    std::vector<ItemId> ids(num_items);
    std::iota(ids.begin(), ids.end(), 1);
    std::stable_sort(ids.begin(), ids.end(),
                     [&](ItemId a, ItemId b) { return attraction_[a - 1] > attraction_[b - 1]; });
    ids.resize(list_size_);
    optimal_.items = std::move(ids);
    optimal_no_click_ = detail::no_click_product(values_of(optimal_));
    optimal_mass_ = detail::attraction_sum(values_of(optimal_));
  }

  int num_items() const noexcept { return static_cast<int>(attraction_.size()); }
  int list_size() const noexcept { return list_size_; }
  std::span<const double> attraction() const noexcept { return attraction_; }
  double attraction(ItemId id) const { return attraction_.at(static_cast<std::size_t>(id - 1)); }

  /// K most attractive items, decreasing attraction, ties by smaller id.
  const Action& optimal_action() const noexcept { return optimal_; }
  /// prod_k (1 - w(a*_k)).
  double optimal_no_click() const noexcept { return optimal_no_click_; }
  /// sum_k w(a*_k).
  double optimal_mass() const noexcept { return optimal_mass_; }

  std::vector<double> values_of(const Action& action) const {
    std::vector<double> values;
    values.reserve(action.size());
    for (ItemId id : action.items) values.push_back(attraction(id));
    return values;
  }

  void validate(const Action& action) const {
    if (static_cast<int>(action.size()) != list_size_) {
      throw std::invalid_argument("action has " + std::to_string(action.size()) +
                                  " items, expected K=" + std::to_string(list_size_));
    }
    std::vector<bool> seen(attraction_.size(), false);
    for (ItemId id : action.items) {
      if (id < 1 || id > num_items()) {
        throw std::invalid_argument("item id " + std::to_string(id) + " outside [1, L]");
      }
      if (seen[id - 1]) throw std::invalid_argument("item id " + std::to_string(id) + " repeated");
      seen[id - 1] = true;
    }
  }

 private:
  int list_size_;
  std::vector<double> attraction_;
  Action optimal_;
  double optimal_no_click_ = 1.0;
  double optimal_mass_ = 0.0;
};

/// Click position (1-based, nullopt = no click) and the examined prefix of
/// attraction realizations.
struct RoundOutcome {
  std::optional<int> click_position;
  std::vector<std::uint8_t> observed;

  bool clicked() const noexcept { return click_position.has_value(); }
  /// min(C_t, K).
  std::size_t examined() const noexcept { return observed.size(); }
  friend bool operator==(const RoundOutcome&, const RoundOutcome&) = default;
};

inline const Action& optimal_action(const Instance& instance) { return instance.optimal_action(); }

inline double click_probability(const Instance& instance, const Action& action) {
  return 1.0 - detail::no_click_product(instance.values_of(action));
}

/// Draws attraction bits position by position and stops at the first click;
/// the unexamined suffix is never drawn.
template <class Rng>
RoundOutcome sample_round(const Instance& instance, const Action& action, Rng& rng) {
  RoundOutcome out;
  out.observed.reserve(action.size());
  for (std::size_t k = 0; k < action.size(); ++k) {
    const bool attracted = bernoulli(rng, instance.attraction(action[k]));
    out.observed.push_back(attracted ? 1 : 0);
    if (attracted) {
      out.click_position = static_cast<int>(k) + 1;
      break;
    }
  }
  return out;
}

/// Expected click-count gap of one round: prod(1 - w(a_k)) - prod(1 - w(a*_k)).
inline double regret_increment(const Instance& instance, const Action& action) {
  const double gap = detail::no_click_product(instance.values_of(action)) - instance.optimal_no_click();
  return gap > 0.0 ? gap : 0.0;
}

/// Document-based regret of one round: sum_k (w(a*_k) - w(a_k)).
inline double doc_regret_increment(const Instance& instance, const Action& action) {
  const double gap = instance.optimal_mass() - detail::attraction_sum(instance.values_of(action));
  return gap > 0.0 ? gap : 0.0;
}

}  // namespace cascade

#endif  // CASCADE_CASCADE_CORE_HPP
