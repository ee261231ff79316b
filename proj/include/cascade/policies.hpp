#ifndef CASCADE_POLICIES_HPP
#define CASCADE_POLICIES_HPP

// Index policies for cascading bandits: every round, score all L items,
// show the K highest-scoring ones in score order, and update the counts of
// the items the user examined.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cascade/cascade_core.hpp"
#include "cascade/divergence.hpp"
#include "cascade/rng.hpp"

namespace cascade {

enum class IndexKind { kKlUcb, kUcb1, kOracle, kUniform };

inline std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::kKlUcb: return "klucb";
    case IndexKind::kUcb1: return "ucb1";
    case IndexKind::kOracle: return "oracle";
    case IndexKind::kUniform: return "uniform";
  }
  return "unknown";
}

/// How items are scored. ORACLE and UNIFORM are baselines that bracket the
/// learned policies.
struct IndexRule {
  IndexKind kind = IndexKind::kKlUcb;
  /// alpha in sqrt(alpha log t / s); must exceed 1.
  double ucb1_scale = 1.5;
  ThresholdForm threshold_form = ThresholdForm::kTLogCubed;
  /// Break exact index ties uniformly at random instead of by smaller id.
  bool random_tiebreak = false;

  void validate() const {
    if (!(ucb1_scale > 1.0)) {
      throw std::invalid_argument("ucb1_scale must be > 1, got " + std::to_string(ucb1_scale));
    }
  }
  friend bool operator==(const IndexRule&, const IndexRule&) = default;
};

/// Per-item observation counts and empirical means, plus the round counter.
///
/// Click counts are kept as integers and the mean is clicks / pulls, which
/// equals the running-mean recursion exactly but without its rounding drift.
class PolicyState {
 public:
  explicit PolicyState(int num_items)
      : pulls_(static_cast<std::size_t>(num_items), 0),
        clicks_(static_cast<std::size_t>(num_items), 0),
        means_(static_cast<std::size_t>(num_items), 0.0) {
    if (num_items < 1) throw std::invalid_argument("PolicyState needs at least one item");
  }

  int num_items() const noexcept { return static_cast<int>(pulls_.size()); }
  /// Current round t (1 before the first round is played).
  std::int64_t round() const noexcept { return round_; }
  std::span<const std::int64_t> pulls() const noexcept { return pulls_; }
  std::span<const double> means() const noexcept { return means_; }
  std::int64_t pulls(ItemId id) const { return pulls_.at(id - 1); }
  double mean(ItemId id) const { return means_.at(id - 1); }
  std::int64_t clicks(ItemId id) const { return clicks_.at(id - 1); }

  /// Applies one round of cascade feedback. Throws std::invalid_argument if
  /// the outcome could not have come from `action`.
  void update(const Action& action, const RoundOutcome& outcome) {
    const std::size_t examined = outcome.examined();
    if (examined > action.size()) {
      throw std::invalid_argument("outcome prefix longer than the action");
    }
    if (outcome.click_position) {
      const int c = *outcome.click_position;
      if (c < 1 || static_cast<std::size_t>(c) != examined) {
        throw std::invalid_argument("click position does not match the observed prefix length");
      }
    } else if (examined != action.size()) {
      throw std::invalid_argument("no-click outcome must observe the whole action");
    }
    for (std::size_t k = 0; k < examined; ++k) {
      const bool last = k + 1 == examined;
      const bool bit = outcome.observed[k] != 0;
      if (bit != (last && outcome.clicked())) {
        throw std::invalid_argument("observed prefix inconsistent with the click position");
      }
    }
    for (std::size_t k = 0; k < examined; ++k) {
      const std::size_t e = static_cast<std::size_t>(action[k] - 1);
      if (e >= pulls_.size()) throw std::invalid_argument("action item outside [1, L]");
      pulls_[e] += 1;
      clicks_[e] += outcome.observed[k];
      means_[e] = static_cast<double>(clicks_[e]) / static_cast<double>(pulls_[e]);
      if (!cache_.level.empty()) cache_.level[e] = -1.0;
    }
    ++round_;
  }

  /// Last exact KL-UCB index of each item and the level (threshold / pulls)
  /// it was solved at; level < 0 marks a stale entry.
  struct IndexCache {
    std::vector<double> level;
    std::vector<double> index;
  };
  IndexCache& klucb_cache() {
    if (cache_.level.size() != pulls_.size()) {
      cache_.level.assign(pulls_.size(), -1.0);
      cache_.index.assign(pulls_.size(), 1.0);
    }
    return cache_;
  }

 private:
  std::vector<std::int64_t> pulls_;
  std::vector<std::int64_t> clicks_;
  std::vector<double> means_;
  std::int64_t round_ = 1;
  IndexCache cache_;
};

inline PolicyState update_state(PolicyState state, const Action& action, const RoundOutcome& outcome) {
  state.update(action, outcome);
  return state;
}

/// Scores for every item. ORACLE needs the instance; UNIFORM draws from rng.
template <class Rng>
std::vector<double> compute_indices(const PolicyState& state, const IndexRule& rule,
                                    const Instance& instance, Rng& rng) {
  const int num_items = state.num_items();
  std::vector<double> indices(static_cast<std::size_t>(num_items));
  switch (rule.kind) {
    case IndexKind::kKlUcb: {
      const auto threshold =
          exploration_threshold(static_cast<double>(state.round()), rule.threshold_form);
      for (int e = 0; e < num_items; ++e) {
        indices[e] = klucb_index(state.means()[e], state.pulls()[e], threshold);
      }
      break;
    }
    case IndexKind::kUcb1: {
      const double t = static_cast<double>(state.round());
      for (int e = 0; e < num_items; ++e) {
        indices[e] = ucb1_index(state.means()[e], state.pulls()[e], t, rule.ucb1_scale);
      }
      break;
    }
    case IndexKind::kOracle:
      std::copy(instance.attraction().begin(), instance.attraction().end(), indices.begin());
      break;
    case IndexKind::kUniform:
      for (auto& v : indices) v = uniform01(rng);
      break;
  }
  return indices;
}

/// K items with the largest indices in decreasing order, ties by smaller id.
inline Action select_action(std::span<const double> indices, int list_size) {
  if (list_size < 1 || static_cast<std::size_t>(list_size) > indices.size()) {
    throw std::invalid_argument("select_action: need 1 <= K <= number of indices");
  }
  std::vector<ItemId> ids(indices.size());
  std::iota(ids.begin(), ids.end(), 1);
  std::partial_sort(ids.begin(), ids.begin() + list_size, ids.end(), [&](ItemId a, ItemId b) {
    const double ia = indices[a - 1];
    const double ib = indices[b - 1];
    return ia != ib ? ia > ib : a < b;
  });
  ids.resize(static_cast<std::size_t>(list_size));
  return Action{std::move(ids)};
}

/// As above, but exact ties are ordered by `tiebreak` (ascending) instead of id.
inline Action select_action(std::span<const double> indices, int list_size,
                            std::span<const double> tiebreak) {
  if (list_size < 1 || static_cast<std::size_t>(list_size) > indices.size() ||
      tiebreak.size() != indices.size()) {
    throw std::invalid_argument("select_action: bad sizes");
  }
  std::vector<ItemId> ids(indices.size());
  std::iota(ids.begin(), ids.end(), 1);
  std::partial_sort(ids.begin(), ids.begin() + list_size, ids.end(), [&](ItemId a, ItemId b) {
    const double ia = indices[a - 1];
    const double ib = indices[b - 1];
    if (ia != ib) return ia > ib;
    const double ta = tiebreak[a - 1];
    const double tb = tiebreak[b - 1];
    return ta != tb ? ta < tb : a < b;
  });
  ids.resize(static_cast<std::size_t>(list_size));
  return Action{std::move(ids)};
}

/// Same action as select_action(compute_indices(...)) for the KL-UCB rule, but
/// only solves for the indices that can still reach the top K.
///
/// Each item gets a cheap upper bound on its index: the closed-form bound,
/// tightened by the tangent line at the item's last exact solve (the index is
/// a concave function of threshold / pulls, since d(p, .) is convex). Items are
/// visited by decreasing bound and the scan stops once the K-th best exact
/// index strictly exceeds the next bound.
inline Action select_klucb_action(PolicyState& state, int list_size, ExplorationThreshold threshold) {
  const int num_items = state.num_items();
  if (list_size < 1 || list_size > num_items) {
    throw std::invalid_argument("select_klucb_action: need 1 <= K <= L");
  }
  struct Candidate {
    double bound;
    ItemId id;
  };
  std::vector<Candidate> order(static_cast<std::size_t>(num_items));
  const auto pulls = state.pulls();
  const auto means = state.means();
  auto& cache = state.klucb_cache();
  for (int e = 0; e < num_items; ++e) {
    double bound = 1.0;
    if (pulls[e] > 0 && means[e] < 1.0) {
      const double level = threshold.value() / static_cast<double>(pulls[e]);
      bound = klucb_upper_bound(means[e], level);
      const double u = cache.index[e];
      if (cache.level[e] >= 0.0 && level >= cache.level[e] && u > means[e] && u < 1.0) {
        const double tangent = u + (level - cache.level[e]) * u * (1.0 - u) / (u - means[e]);
        bound = std::min(bound, tangent);
      }
      // Margin covers the last-ulp wobble of the Newton iterate.
      bound = std::min(1.0, bound * (1.0 + 1e-12) + 1e-14);
    }
    order[e] = {bound, e + 1};
  }
  std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    return a.bound != b.bound ? a.bound > b.bound : a.id < b.id;
  });

  struct Scored {
    double index;
    ItemId id;
  };
  auto better = [](const Scored& a, const Scored& b) {
    return a.index != b.index ? a.index > b.index : a.id < b.id;
  };
  std::vector<Scored> top;
  top.reserve(static_cast<std::size_t>(list_size) + 1);
  for (const Candidate& c : order) {
    if (static_cast<int>(top.size()) == list_size && c.bound < top.back().index) break;
    const std::size_t e = static_cast<std::size_t>(c.id - 1);
    const Scored s{klucb_index(means[e], pulls[e], threshold), c.id};
    if (pulls[e] > 0) {
      cache.level[e] = threshold.value() / static_cast<double>(pulls[e]);
      cache.index[e] = s.index;
    }
    if (static_cast<int>(top.size()) < list_size || better(s, top.back())) {
      top.insert(std::upper_bound(top.begin(), top.end(), s, better), s);
      if (static_cast<int>(top.size()) > list_size) top.pop_back();
    }
  }
  Action action;
  action.items.reserve(top.size());
  for (const Scored& s : top) action.items.push_back(s.id);
  return action;
}

struct StepResult {
  Action action;
  RoundOutcome outcome;
  /// Expected cascade regret of the played action.
  double regret = 0.0;
};

/// One round: score, rank, show, observe, update. `state` is advanced in place.
template <class Rng>
StepResult step(PolicyState& state, const IndexRule& rule, const Instance& instance, Rng& rng) {
  const int list_size = instance.list_size();
  StepResult result;
  if (rule.kind == IndexKind::kKlUcb && !rule.random_tiebreak) {
    result.action = select_klucb_action(
        state, list_size, exploration_threshold(static_cast<double>(state.round()), rule.threshold_form));
  } else {
    const auto indices = compute_indices(state, rule, instance, rng);
    if (rule.random_tiebreak) {
      std::vector<double> keys(indices.size());
      for (auto& k : keys) k = uniform01(rng);
      result.action = select_action(indices, list_size, keys);
    } else {
      result.action = select_action(indices, list_size);
    }
  }
  result.outcome = sample_round(instance, result.action, rng);
  state.update(result.action, result.outcome);
  result.regret = regret_increment(instance, result.action);
  return result;
}

}  // namespace cascade

#endif  // CASCADE_POLICIES_HPP
