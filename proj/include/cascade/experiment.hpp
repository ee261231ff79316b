#ifndef CASCADE_EXPERIMENT_HPP
#define CASCADE_EXPERIMENT_HPP

// Monte Carlo regret estimation.
//
// A trial runs one policy for n rounds on its own random stream, derived from
// (seed, trial index), and records the cumulative regret at checkpoints.
// Trials are fanned out to worker threads and reduced in trial-index order, so
// results never depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cascade/cascade_core.hpp"
#include "cascade/instances.hpp"
#include "cascade/policies.hpp"
#include "cascade/rng.hpp"

namespace cascade {

enum class RegretMetric { kCascade, kDocument };

inline std::string_view to_string(RegretMetric metric) {
  return metric == RegretMetric::kCascade ? "cascade" : "document";
}

/// Powers of two below n, then n itself.
inline std::vector<std::int64_t> default_checkpoints(std::int64_t horizon) {
  std::vector<std::int64_t> out;
  for (std::int64_t c = 1; c < horizon; c *= 2) out.push_back(c);
  out.push_back(horizon);
  return out;
}

struct ExperimentConfig {
  InstanceSpec instance;
  IndexRule rule;
  std::int64_t horizon = 1;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  /// Empty means default_checkpoints(horizon).
  std::vector<std::int64_t> checkpoints;
  RegretMetric metric = RegretMetric::kCascade;
  /// Accumulate realized no-click indicators instead of expected increments.
  bool realized = false;

  std::vector<std::int64_t> resolved_checkpoints() const {
    return checkpoints.empty() ? default_checkpoints(horizon) : checkpoints;
  }

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    rule.validate();
    if (realized && metric != RegretMetric::kCascade) {
      throw std::invalid_argument("realized regret is only defined for the cascade metric");
    }
    const auto cps = resolved_checkpoints();
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (cps[i] < 1 || cps[i] > horizon) throw std::invalid_argument("checkpoints must lie in [1, n]");
      if (i > 0 && cps[i] <= cps[i - 1]) throw std::invalid_argument("checkpoints must be strictly increasing");
    }
    if (cps.back() != horizon) throw std::invalid_argument("last checkpoint must equal n");
  }
};

struct RegretTrace {
  std::int64_t trial_index = 0;
  std::vector<double> cum_regret;
  std::uint64_t seed_used = 0;
  friend bool operator==(const RegretTrace&, const RegretTrace&) = default;
};

/// Runs one trial on a prebuilt instance.
inline RegretTrace run_trial(const ExperimentConfig& config, const Instance& instance,
                             std::int64_t trial_index) {
  const auto checkpoints = config.resolved_checkpoints();
  Engine rng = make_stream(config.seed, static_cast<std::uint64_t>(trial_index));
  PolicyState state(instance.num_items());
  RegretTrace trace{trial_index, {}, config.seed};
  trace.cum_regret.reserve(checkpoints.size());

  double cum = 0.0;
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const StepResult r = step(state, config.rule, instance, rng);
    if (config.metric == RegretMetric::kDocument) {
      cum += doc_regret_increment(instance, r.action);
    } else if (config.realized) {
      cum += (r.outcome.clicked() ? 0.0 : 1.0) - instance.optimal_no_click();
    } else {
      cum += r.regret;
    }
    if (next < checkpoints.size() && checkpoints[next] == t) {
      trace.cum_regret.push_back(cum);
      ++next;
    }
  }
  return trace;
}

inline RegretTrace run_trial(const ExperimentConfig& config, std::int64_t trial_index) {
  config.validate();
  return run_trial(config, build_instance(config.instance, config.horizon), trial_index);
}

struct ExperimentResult {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> mean;
  /// Standard error of the mean; zero for a single trial.
  std::vector<double> std_error;
  std::vector<RegretTrace> traces;

  double terminal_mean() const { return mean.back(); }
  double terminal_stderr() const { return std_error.back(); }
};

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls fn(i) for i in [0, count) on up to `workers` threads.
template <class Fn>
void parallel_for(std::int64_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, std::max<std::int64_t>(count, 1)));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline ExperimentResult aggregate(std::vector<std::int64_t> checkpoints, std::vector<RegretTrace> traces) {
  ExperimentResult res;
  res.checkpoints = std::move(checkpoints);
  const std::size_t nc = res.checkpoints.size();
  const double trials = static_cast<double>(traces.size());
  res.mean.assign(nc, 0.0);
  res.std_error.assign(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    double sum = 0.0;
    for (const auto& tr : traces) sum += tr.cum_regret[c];
    const double mean = sum / trials;
    double ss = 0.0;
    for (const auto& tr : traces) ss += (tr.cum_regret[c] - mean) * (tr.cum_regret[c] - mean);
    res.mean[c] = mean;
    res.std_error[c] = traces.size() > 1 ? std::sqrt(ss / (trials - 1.0) / trials) : 0.0;
  }
  res.traces = std::move(traces);
  return res;
}

/// `workers` == 0 uses every hardware thread.
inline ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers = 0) {
  config.validate();
  const Instance instance = build_instance(config.instance, config.horizon);
  std::vector<RegretTrace> traces(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, workers,
               [&](std::int64_t i) { traces[static_cast<std::size_t>(i)] = run_trial(config, instance, i); });
  return aggregate(config.resolved_checkpoints(), std::move(traces));
}

// ---------------------------------------------------------------------------
// Sweeps and scaling fits

enum class SweepAxis { kK, kN, kL };

inline std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kK: return "K";
    case SweepAxis::kN: return "n";
    case SweepAxis::kL: return "L";
  }
  return "?";
}

/// Copy of `base` with one axis set to `value`. The instance is rebuilt from
/// its spec, so generators that depend on (L, K, n) follow the new value.
inline ExperimentConfig config_at(const ExperimentConfig& base, SweepAxis axis, std::int64_t value) {
  ExperimentConfig cfg = base;
  switch (axis) {
    case SweepAxis::kK:
      cfg.instance.K = static_cast<int>(value);
      if (cfg.instance.kind == InstanceKind::kLowerBoundFamily && cfg.instance.m.size() != static_cast<std::size_t>(value)) {
        cfg.instance.m.clear();
      }
      break;
    case SweepAxis::kL:
      if (cfg.instance.kind == InstanceKind::kExplicit) {
        throw std::invalid_argument("an explicit instance cannot be swept over L");
      }
      cfg.instance.L = static_cast<int>(value);
      break;
    case SweepAxis::kN: {
      cfg.horizon = value;
      cfg.instance.n.reset();
      if (!base.checkpoints.empty()) {
        std::vector<std::int64_t> cps;
        for (auto c : base.checkpoints) {
          if (c < value) cps.push_back(c);
        }
        cps.push_back(value);
        cfg.checkpoints = std::move(cps);
      }
      break;
    }
  }
  return cfg;
}

struct SweepPoint {
  std::int64_t axis_value = 0;
  ExperimentConfig config;
  ExperimentResult result;
  double mean_terminal = 0.0;
  double terminal_std_error = 0.0;
};

inline std::vector<SweepPoint> sweep(const ExperimentConfig& base, SweepAxis axis,
                                     const std::vector<std::int64_t>& values, unsigned workers = 0) {
  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (std::int64_t v : values) {
    SweepPoint pt;
    pt.axis_value = v;
    pt.config = config_at(base, axis, v);
    pt.result = run_experiment(pt.config, workers);
    pt.mean_terminal = pt.result.terminal_mean();
    pt.terminal_std_error = pt.result.terminal_stderr();
    out.push_back(std::move(pt));
  }
  return out;
}

inline std::vector<SweepPoint> sweep_K(const ExperimentConfig& base, const std::vector<std::int64_t>& list_sizes,
                                       unsigned workers = 0) {
  return sweep(base, SweepAxis::kK, list_sizes, workers);
}

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

/// Least-squares line through (log x, log y): y ~ exp(intercept) x^exponent.
inline ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_scaling needs at least 2 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_scaling needs positive x and y");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_scaling needs at least two distinct x values");
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.points_used = static_cast<int>(points.size());
  if (syy <= 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

/// Fit over the sweep points with positive terminal regret; nullopt when
/// fewer than two such points exist.
inline std::optional<ScalingFit> fit_sweep(const std::vector<SweepPoint>& points) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : points) {
    if (p.mean_terminal > 0.0) xy.emplace_back(static_cast<double>(p.axis_value), p.mean_terminal);
  }
  if (xy.size() < 2) return std::nullopt;
  for (std::size_t i = 1; i < xy.size(); ++i) {
    if (xy[i].first != xy[0].first) return fit_scaling(xy);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lower-bound family probe

struct FamilyProbe {
  std::vector<int> worst_m;
  double worst_mean = 0.0;
  double average_mean = 0.0;
  std::vector<double> member_means;
  std::vector<double> member_stderrs;
};

/// Document-metric regret of `rule` on every member of the lower-bound family
/// (or a seeded sample of it); returns the worst member.
inline FamilyProbe max_over_family(int L, int K, std::int64_t n, const IndexRule& rule, std::int64_t trials,
                                   std::uint64_t seed, unsigned workers = 0,
                                   std::optional<FamilySampling> sampling = std::nullopt) {
  const auto family = enumerate_family(L, K, n, sampling);
  FamilyProbe probe;
  probe.worst_mean = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& member : family) {
    ExperimentConfig cfg;
    cfg.instance.kind = InstanceKind::kLowerBoundFamily;
    cfg.instance.L = L;
    cfg.instance.K = K;
    cfg.instance.n = n;
    cfg.instance.m = member.m;
    cfg.rule = rule;
    cfg.horizon = n;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.checkpoints = {n};
    cfg.metric = RegretMetric::kDocument;
    const auto res = run_experiment(cfg, workers);
    const double mean = res.terminal_mean();
    probe.member_means.push_back(mean);
    probe.member_stderrs.push_back(res.terminal_stderr());
    sum += mean;
    if (mean > probe.worst_mean) {
      probe.worst_mean = mean;
      probe.worst_m = member.m;
    }
  }
  probe.average_mean = sum / static_cast<double>(family.size());
  return probe;
}

// ---------------------------------------------------------------------------
// Numeric checks of the UCB1 lower-bound constants

struct ChiCheck {
  bool passed = false;
  /// min over the grid of LHS - RHS.
  double min_slack = 0.0;
  /// min over the grid of the LHS alone.
  double min_lhs = 0.0;
  std::int64_t worst_t = 0;
  std::int64_t worst_s = 0;
};

namespace detail {

inline double hoeffding_width(double t, double s) { return std::sqrt(1.5 * std::log(t) / s); }

inline std::vector<std::int64_t> integer_grid(std::int64_t lo, std::int64_t hi, int points) {
  std::vector<std::int64_t> out;
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    out.push_back(lo + static_cast<std::int64_t>(std::llround(f * static_cast<double>(hi - lo))));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Evaluates (1 - sqrt(5/6)) c(t,s) - 2 c(t, ceil(n/4) - 1) > sqrt(L/(chi n K))
/// with c(t,s) = sqrt(1.5 log t / s) on a 20x20 grid of t in [ceil(n/4), n]
/// and s in [1, floor(nK/(3L))], corners included.
inline ChiCheck check_chi_constant(std::int64_t n, int K, int L, double chi) {
  if (static_cast<double>(n) < static_cast<double>(L) * K) {
    throw std::invalid_argument("check_chi_constant requires n >= L*K");
  }
  if (static_cast<double>(L) < 800.0 * K) {
    throw std::invalid_argument("check_chi_constant requires L >= 800*K");
  }
  const std::int64_t t_lo = (n + 3) / 4;
  const std::int64_t s_hi = std::max<std::int64_t>(1, (n * K) / (3 * static_cast<std::int64_t>(L)));
  const double rhs = std::sqrt(static_cast<double>(L) / (chi * static_cast<double>(n) * K));
  const double s_ref = static_cast<double>(t_lo - 1);

  ChiCheck out;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.min_lhs = std::numeric_limits<double>::infinity();
  for (std::int64_t t : detail::integer_grid(t_lo, n, 20)) {
    for (std::int64_t s : detail::integer_grid(1, s_hi, 20)) {
      const double td = static_cast<double>(t);
      const double lhs = (1.0 - std::sqrt(5.0 / 6.0)) * detail::hoeffding_width(td, static_cast<double>(s)) -
                         2.0 * detail::hoeffding_width(td, s_ref);
      if (lhs < out.min_lhs) out.min_lhs = lhs;
      if (lhs - rhs < out.min_slack) {
        out.min_slack = lhs - rhs;
        out.worst_t = t;
        out.worst_s = s;
      }
    }
  }
  out.passed = out.min_slack > 0.0;
  return out;
}

/// Smallest chi for which check_chi_constant passes on its grid (the
/// inequality is monotone in chi), located by bisection.
inline double chi_empirical_threshold(std::int64_t n, int K, int L) {
  double lo = 1e-12, hi = 1.0;
  while (!check_chi_constant(n, K, L, hi).passed) {
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (check_chi_constant(n, K, L, mid).passed ? hi : lo) = mid;
  }
  return hi;
}

struct TailSumCheck {
  bool passed = false;
  double total = 0.0;
  double bound = 0.0;
  /// 1 - total / bound.
  double relative_slack = 0.0;
};

/// sum_{t >= ceil(n/4)} (t^-3 + t^-5/2) <= 10 n^{-3/2}: explicit sum up to
/// 1e7, plus the integral of x^-c from 1e7 to infinity for the remainder.
inline TailSumCheck check_tail_sum(std::int64_t n) {
  if (n < 800) throw std::invalid_argument("check_tail_sum requires n >= 800");
  constexpr std::int64_t kExplicitEnd = 10'000'000;
  const std::int64_t start = (n + 3) / 4;
  double total = 0.0;
  std::int64_t tail_from = start - 1;
  if (start <= kExplicitEnd) {
    // Smallest terms first.
    for (std::int64_t t = kExplicitEnd; t >= start; --t) {
      const double td = static_cast<double>(t);
      total += 1.0 / (td * td * td) + 1.0 / (td * td * std::sqrt(td));
    }
    tail_from = kExplicitEnd;
  }
  const double x = static_cast<double>(tail_from);
  total += 1.0 / (2.0 * x * x) + 1.0 / (1.5 * x * std::sqrt(x));
  TailSumCheck out;
  out.total = total;
  out.bound = 10.0 * std::pow(static_cast<double>(n), -1.5);
  out.relative_slack = 1.0 - total / out.bound;
  out.passed = total <= out.bound;
  return out;
}

}  // namespace cascade

#endif  // CASCADE_EXPERIMENT_HPP
