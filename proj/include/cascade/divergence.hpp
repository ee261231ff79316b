#ifndef CASCADE_DIVERGENCE_HPP
#define CASCADE_DIVERGENCE_HPP

// Bernoulli KL-divergence and the upper-confidence indices built on it.
//
// Every function here is pure and safe to call concurrently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace cascade {

/// Exploration level (in nats) fed to the KL-UCB index, before division by
/// the observation count. Always finite and nonnegative.
class ExplorationThreshold {
 public:
  constexpr ExplorationThreshold() = default;
  explicit ExplorationThreshold(double nats) : value_(nats) {
    if (!(nats >= 0.0) || !std::isfinite(nats)) {
      throw std::invalid_argument("exploration threshold must be finite and >= 0, got " +
                                  std::to_string(nats));
    }
  }
  constexpr double value() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// Which reading of f(t) the KL-UCB rule uses.
///   kTLogCubed        threshold = log(t (log t)^3)
///   kLiteralDoubleLog threshold = log(log(t (log t)^3)), kept for auditing
enum class ThresholdForm { kTLogCubed, kLiteralDoubleLog };

/// d(p, q) in nats, with 0 log 0 = 0. Infinite iff q is 0 or 1 and p != q.
inline double bernoulli_kl(double p, double q) noexcept {
  if (p == q) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double d = 0.0;
  if (p > 0.0) {
    if (q <= 0.0) return kInf;
    d += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q >= 1.0) return kInf;
    d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  // Rounding can push d a hair below zero when p and q are adjacent doubles.
  return d > 0.0 ? d : 0.0;
}

/// Derivative of d(p, .) at q, for q in (0, 1).
inline double bernoulli_kl_dq(double p, double q) noexcept {
  return (q - p) / (q * (1.0 - q));
}

inline ExplorationThreshold exploration_threshold(double round,
                                                  ThresholdForm form = ThresholdForm::kTLogCubed) {
  if (!(round >= 1.0)) {
    throw std::invalid_argument("exploration_threshold: round must be >= 1");
  }
  if (round == 1.0) return ExplorationThreshold{0.0};
  const double log_t = std::log(round);
  // log(t (log t)^3) = log t + 3 log log t; avoids overflow of t (log t)^3.
  const double inner = log_t + 3.0 * std::log(log_t);
  if (form == ThresholdForm::kTLogCubed) {
    return ExplorationThreshold{std::max(inner, 0.0)};
  }
  return ExplorationThreshold{inner > 1.0 ? std::log(inner) : 0.0};
}

/// Closed-form upper bound on the KL-UCB index for `level` = threshold/count.
///
/// Combines Pinsker, d(p,q) >= 2(q-p)^2, with d(p,q) >= (q-p)^2 / (2q) for
/// p <= q; the latter is much tighter for small means.
inline double klucb_upper_bound(double mean, double level) noexcept {
  if (level <= 0.0) return mean;
  const double pinsker = mean + std::sqrt(0.5 * level);
  const double chi_sq = mean + level + std::sqrt(level * level + 2.0 * mean * level);
  return std::min({pinsker, chi_sq, 1.0});
}

/// KL-UCB index: max { u in [mean, 1] : d(mean, u) <= threshold / count }.
///
/// count == 0 yields 1 so unseen items are explored first. The root is found
/// by Newton steps from the closed-form upper bound, falling back to
/// bisection whenever a step leaves the bracket; iteration stops at machine
/// precision, well below the 1e-9 tolerance the callers rely on.
inline double klucb_index(double mean, std::int64_t count, ExplorationThreshold threshold) {
  if (count <= 0) return 1.0;
  if (mean >= 1.0) return 1.0;
  mean = std::max(mean, 0.0);
  const double level = threshold.value() / static_cast<double>(count);
  if (level <= 0.0) return mean;

  double lo = mean;
  double hi = 1.0;
  double x = klucb_upper_bound(mean, level);
  if (x >= 1.0) {
    x = 0.5 * (lo + hi);
  }
  constexpr int kMaxIterations = 200;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = bernoulli_kl(mean, x) - level;
    if (g > 0.0) {
      hi = x;
    } else if (g < 0.0) {
      lo = x;
    } else {
      return x;
    }
    const double slope = bernoulli_kl_dq(mean, x);
    double next = slope > 0.0 ? x - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    const bool converged = std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * x;
    x = next;
    if (converged) break;
  }
  return std::clamp(x, mean, 1.0);
}

/// UCB1 index min(mean + sqrt(scale log(round) / count), 1); count == 0
/// yields 1.
inline double ucb1_index(double mean, std::int64_t count, double round, double scale = 1.5) {
  if (count <= 0) return 1.0;
  const double log_t = round > 1.0 ? std::log(round) : 0.0;
  return std::min(mean + std::sqrt(scale * log_t / static_cast<double>(count)), 1.0);
}

}  // namespace cascade

#endif  // CASCADE_DIVERGENCE_HPP
