#ifndef CASCADE_THEORY_CHECKS_HPP
#define CASCADE_THEORY_CHECKS_HPP

// Numeric verification of the inequalities the regret analysis rests on:
// the Bernoulli-KL inequality family on dense grids, the product bound on
// random vectors, and the constants of the UCB1 lower-bound argument.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cascade/divergence.hpp"
#include "cascade/experiment.hpp"
#include "cascade/instances.hpp"
#include "cascade/rng.hpp"

namespace cascade {

struct ClaimResult {
  std::string name;
  std::string statement;
  bool passed = true;
  /// Smallest observed (lhs - rhs); negative beyond -tolerance means failure.
  double worst_slack = std::numeric_limits<double>::infinity();
  std::int64_t evaluations = 0;
};

struct TheoryCheckOptions {
  /// Grid points per axis; the grid is i / (grid + 1), i = 1..grid.
  int grid = 200;
  double tolerance = 1e-12;
  /// Denominator constant of the KL lower bound, exposed for mutation tests.
  double kl_lower_constant = 12.0;
  std::int64_t product_trials = 20000;
  std::uint64_t seed = 20220323;
};

namespace detail {

class ClaimAccumulator {
 public:
  ClaimAccumulator(std::string name, std::string statement, double tolerance) : tol_(tolerance) {
    result_.name = std::move(name);
    result_.statement = std::move(statement);
  }
  void record(double slack) {
    ++result_.evaluations;
    if (!(slack >= -tol_)) result_.passed = false;
    if (slack < result_.worst_slack || std::isnan(slack)) result_.worst_slack = slack;
  }
  void require(bool ok) {
    ++result_.evaluations;
    if (!ok) result_.passed = false;
  }
  ClaimResult take() {
    if (result_.worst_slack == std::numeric_limits<double>::infinity()) result_.worst_slack = 0.0;
    return std::move(result_);
  }

 private:
  double tol_;
  ClaimResult result_;
};

inline std::vector<double> unit_grid(int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i + 1) / (points + 1);
  return g;
}

}  // namespace detail

inline ClaimResult check_kl_nonnegativity(const TheoryCheckOptions& opt) {
  detail::ClaimAccumulator acc("kl_nonnegativity", "d(p,q) >= 0, with equality iff p = q", opt.tolerance);
  const auto g = detail::unit_grid(opt.grid);
  for (double p : g) {
    for (double q : g) {
      const double d = bernoulli_kl(p, q);
      acc.record(d);
      acc.require((d == 0.0) == (p == q));
    }
  }
  return acc.take();
}

inline ClaimResult check_kl_convexity(const TheoryCheckOptions& opt) {
  detail::ClaimAccumulator acc("kl_convexity", "d(p, l q1 + (1-l) q2) <= l d(p,q1) + (1-l) d(p,q2)",
                               opt.tolerance);
  const auto g = detail::unit_grid(opt.grid);
  const double lambdas[] = {0.25, 0.5, 0.75};
  for (double p : g) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d1 = bernoulli_kl(p, g[i]);
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        const double d2 = bernoulli_kl(p, g[j]);
        for (double l : lambdas) {
          const double mid = l * g[i] + (1.0 - l) * g[j];
          acc.record(l * d1 + (1.0 - l) * d2 - bernoulli_kl(p, mid));
        }
      }
    }
  }
  return acc.take();
}

inline ClaimResult check_pinsker(const TheoryCheckOptions& opt) {
  detail::ClaimAccumulator acc("pinsker", "d(p,q) >= 2 (q-p)^2", opt.tolerance);
  const auto g = detail::unit_grid(opt.grid);
  for (double p : g) {
    for (double q : g) acc.record(bernoulli_kl(p, q) - 2.0 * (q - p) * (q - p));
  }
  return acc.take();
}

inline ClaimResult check_kl_chain(const TheoryCheckOptions& opt) {
  detail::ClaimAccumulator acc("kl_chain", "d(p,r) >= d(p,q) + d(q,r) for p < q < r", opt.tolerance);
  const auto g = detail::unit_grid(opt.grid);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dpq = bernoulli_kl(g[i], g[j]);
      for (std::size_t k = j + 1; k < n; ++k) {
        acc.record(bernoulli_kl(g[i], g[k]) - dpq - bernoulli_kl(g[j], g[k]));
      }
    }
  }
  return acc.take();
}

inline ClaimResult check_kl_lower_bound(const TheoryCheckOptions& opt) {
  detail::ClaimAccumulator acc("kl_lower_bound",
                               "d(p,q) > (q-p)^2 / (c q) for 0 < p < q < 1, c = " +
                                   std::to_string(opt.kl_lower_constant),
                               opt.tolerance);
  const auto g = detail::unit_grid(opt.grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double p = g[i], q = g[j];
      const double bound = (q - p) * (q - p) / (opt.kl_lower_constant * q);
      acc.record(bernoulli_kl(p, q) - bound);
      // Strict: the bound is never attained.
      acc.require(bernoulli_kl(p, q) > bound || std::abs(bernoulli_kl(p, q) - bound) <= opt.tolerance);
    }
  }
  return acc.take();
}

inline ClaimResult check_kl_upper_bound(const TheoryCheckOptions& opt) {
  detail::ClaimAccumulator acc("kl_upper_bound", "d(p,q) <= (p-q)^2 / (q (1-q))", opt.tolerance);
  const auto g = detail::unit_grid(opt.grid);
  for (double p : g) {
    for (double q : g) acc.record((p - q) * (p - q) / (q * (1.0 - q)) - bernoulli_kl(p, q));
  }
  return acc.take();
}

inline ClaimResult check_kl_ratio(const TheoryCheckOptions& opt) {
  // Cross-multiplied so the slack stays on the scale of d, not 1/d.
  detail::ClaimAccumulator acc("kl_ratio_monotonicity",
                               "(q-p)/d(p,q) >= (r-p)/d(p,r) for 0 < p < q < r < 1", opt.tolerance);
  const auto g = detail::unit_grid(opt.grid);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dpq = bernoulli_kl(g[i], g[j]);
      for (std::size_t k = j + 1; k < n; ++k) {
        acc.record((g[j] - g[i]) * bernoulli_kl(g[i], g[k]) - (g[k] - g[i]) * dpq);
      }
    }
  }
  return acc.take();
}

inline ClaimResult check_product_bound(const TheoryCheckOptions& opt) {
  detail::ClaimAccumulator acc("product_bound",
                               "prod x - prod y >= delta^(K-1) sum (x - y) for x >= y >= delta in (0,1)",
                               opt.tolerance);
  Engine rng(derive_stream_seed(opt.seed, 0xB1));
  for (std::int64_t trial = 0; trial < opt.product_trials; ++trial) {
    const int K = 1 + static_cast<int>(rng() % 20);
    const double delta = 0.01 + 0.98 * uniform01(rng);
    double px = 1.0, py = 1.0, gap = 0.0;
    for (int k = 0; k < K; ++k) {
      const double y = delta + (1.0 - delta) * uniform01(rng);
      const double x = y + (1.0 - y) * uniform01(rng);
      px *= x;
      py *= y;
      gap += x - y;
    }
    acc.record(px - py - std::pow(delta, K - 1) * gap);
  }
  return acc.take();
}

inline ClaimResult check_chi_claim() {
  detail::ClaimAccumulator acc("chi_constant",
                               "(1 - sqrt(5/6)) c(t,s) - 2 c(t, ceil(n/4)-1) > sqrt(L/(chi n K)) at "
                               "n=3200, K=2, L=1600, chi = pinned constant",
                               0.0);
  const double chi = theorem3_chi_constant();
  acc.require(chi >= 4.0);
  const double bracket = (1.0 - std::sqrt(5.0 / 6.0)) * std::sqrt(4.5) - std::sqrt(1.0 / 32.0);
  acc.record(bracket);
  acc.require(bracket > 0.0);
  const ChiCheck c = check_chi_constant(3200, 2, 1600, chi);
  acc.record(c.min_slack);
  acc.require(c.passed);
  return acc.take();
}

inline ClaimResult check_tail_sum_claim() {
  detail::ClaimAccumulator acc("tail_sum", "sum_{t >= ceil(n/4)} (t^-3 + t^-5/2) <= 10 n^{-3/2}, n in {800, 1e4, 1e6}",
                               0.0);
  for (std::int64_t n : {std::int64_t{800}, std::int64_t{10'000}, std::int64_t{1'000'000}}) {
    const TailSumCheck c = check_tail_sum(n);
    acc.record(c.bound - c.total);
    acc.require(c.passed);
  }
  return acc.take();
}

/// Every claim, in a fixed order.
inline std::vector<ClaimResult> run_theory_checks(const TheoryCheckOptions& opt = {}) {
  std::vector<ClaimResult> out;
  out.push_back(check_kl_nonnegativity(opt));
  out.push_back(check_kl_convexity(opt));
  out.push_back(check_pinsker(opt));
  out.push_back(check_kl_chain(opt));
  out.push_back(check_kl_lower_bound(opt));
  out.push_back(check_kl_upper_bound(opt));
  out.push_back(check_kl_ratio(opt));
  out.push_back(check_product_bound(opt));
  out.push_back(check_chi_claim());
  out.push_back(check_tail_sum_claim());
  return out;
}

}  // namespace cascade

#endif  // CASCADE_THEORY_CHECKS_HPP
