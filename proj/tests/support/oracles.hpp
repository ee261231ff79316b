#ifndef CASCADE_TESTS_ORACLES_HPP
#define CASCADE_TESTS_ORACLES_HPP

// Independent reference computations used only by the tests. Nothing here
// calls into the policy or experiment code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "cascade/divergence.hpp"
#include "cascade/rng.hpp"

namespace oracle {

/// Calls fn(subset) for every size-k subset of {1..n}, ids ascending.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i + 1;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i + 1) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Largest click probability over all size-k subsets, by enumeration.
inline double best_click_probability(const std::vector<double>& w, int k) {
  double best = -1.0;
  for_each_subset(static_cast<int>(w.size()), k, [&](const std::vector<int>& s) {
    double prod = 1.0;
    for (int id : s) prod *= 1.0 - w[id - 1];
    best = std::max(best, 1.0 - prod);
  });
  return best;
}

/// Elementary symmetric polynomial e_k(x) by the standard DP.
inline double elementary_symmetric(const std::vector<double>& x, int k) {
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (double v : x) {
    for (int j = k; j >= 1; --j) e[j] += e[j - 1] * v;
  }
  return e[k];
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Plain L-armed KL-UCB: play the arm with the largest index (ties to the
/// smaller id), observe one Bernoulli draw, update sum and count.
class LArmedKlUcb {
 public:
  explicit LArmedKlUcb(std::vector<double> means) : w_(std::move(means)), sums_(w_.size(), 0), counts_(w_.size(), 0) {}

  template <class Rng>
  int play(Rng& rng) {
    const auto threshold = cascade::exploration_threshold(static_cast<double>(t_));
    int best = 0;
    double best_index = -1.0;
    for (std::size_t a = 0; a < w_.size(); ++a) {
      const double mean = counts_[a] == 0 ? 0.0 : static_cast<double>(sums_[a]) / static_cast<double>(counts_[a]);
      const double idx = cascade::klucb_index(mean, counts_[a], threshold);
      if (idx > best_index) {
        best_index = idx;
        best = static_cast<int>(a);
      }
    }
    const bool reward = cascade::uniform01(rng) < w_[best];
    sums_[best] += reward ? 1 : 0;
    counts_[best] += 1;
    ++t_;
    return best + 1;
  }

 private:
  std::vector<double> w_;
  std::vector<std::int64_t> sums_;
  std::vector<std::int64_t> counts_;
  std::int64_t t_ = 1;
};

}  // namespace oracle

#endif  // CASCADE_TESTS_ORACLES_HPP
