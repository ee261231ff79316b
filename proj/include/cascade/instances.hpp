#ifndef CASCADE_INSTANCES_HPP
#define CASCADE_INSTANCES_HPP

// Generators for the instance families used in the experiments:
//   two-level      K items at p, the rest at p - delta
//   theorem3       the hard instance for UCB1-style indices
//   lower-bound    K groups of N items, one elevated item per group
//   explicit       user-supplied weights

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cascade/cascade_core.hpp"
#include "cascade/rng.hpp"

namespace cascade {

enum class InstanceKind { kTwoLevel, kTheorem3, kLowerBoundFamily, kExplicit };

inline std::string_view to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kTwoLevel: return "two_level";
    case InstanceKind::kTheorem3: return "theorem3";
    case InstanceKind::kLowerBoundFamily: return "lower_bound_family";
    case InstanceKind::kExplicit: return "explicit";
  }
  return "unknown";
}

/// Serializable description of an instance. Only the fields relevant to
/// `kind` are read. A missing `n` means "use the experiment horizon".
struct InstanceSpec {
  InstanceKind kind = InstanceKind::kTwoLevel;
  int L = 0;
  int K = 0;
  std::optional<std::int64_t> n;
  double p = 0.0;
  double delta = 0.0;
  double chi = 4.0;
  std::vector<int> m;
  std::vector<double> weights;

  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

inline Instance gen_two_level(int L, int K, double p, double delta) {
  if (!(p <= 1.0)) throw InstanceError("two_level: p must be <= 1");
  if (!(delta >= 0.0)) throw InstanceError("two_level: delta must be >= 0");
  if (!(p - delta >= 0.0)) throw InstanceError("two_level: p - delta must be >= 0");
  if (K < 1 || K > L) throw InstanceError("two_level: need 1 <= K <= L");
  std::vector<double> w(static_cast<std::size_t>(L), p - delta);
  std::fill(w.begin(), w.begin() + K, p);
  return Instance(K, std::move(w));
}

/// Gap of the theorem3 instance kind, sqrt(L / (chi n K)).
inline double theorem3_gap(int L, int K, std::int64_t n, double chi) {
  return std::sqrt(static_cast<double>(L) / (chi * static_cast<double>(n) * K));
}

/// First K items at eps = 1/(2K), the rest at eps - gap.
inline Instance gen_theorem3(int L, int K, std::int64_t n, double chi) {
  if (K < 1 || K > L) throw InstanceError("theorem3: need 1 <= K <= L");
  if (n < 1) throw InstanceError("theorem3: horizon n must be >= 1");
  if (!(chi > 0.0)) throw InstanceError("theorem3: chi must be > 0");
  const double eps = 1.0 / (2.0 * K);
  const double gap = theorem3_gap(L, K, n, chi);
  if (eps < gap) {
    throw InstanceError("theorem3: eps = 1/(2K) must be >= delta = sqrt(L/(chi n K)) (eps=" +
                        std::to_string(eps) + ", delta=" + std::to_string(gap) + ")");
  }
  std::vector<double> w(static_cast<std::size_t>(L), eps - gap);
  std::fill(w.begin(), w.begin() + K, eps);
  return Instance(K, std::move(w));
}

/// Hypotheses of the UCB1 lower-bound theorem that (L, K, n) violates.
/// Violations are legitimate at desk scale; callers report them as warnings.
inline std::vector<std::string> theorem3_hypothesis_violations(int L, int K, std::int64_t n) {
  std::vector<std::string> out;
  const double k = K;
  if (static_cast<double>(n) < static_cast<double>(L) * k) out.push_back("n >= L*K does not hold");
  if (static_cast<double>(n) < 49.0 * k * k * k * k) out.push_back("n >= 49*K^4 does not hold");
  if (static_cast<double>(L) < 800.0 * k) out.push_back("L >= 800*K does not hold");
  return out;
}

/// 1 / (log 200 ((1 - sqrt(5/6)) sqrt(9/2) - sqrt(1/32))^2), about 2911.1.
inline double theorem3_chi_constant() {
  const double bracket = (1.0 - std::sqrt(5.0 / 6.0)) * std::sqrt(4.5) - std::sqrt(1.0 / 32.0);
  return 1.0 / (std::log(200.0) * bracket * bracket);
}

/// Gap of the lower-bound family, sqrt(L / (4 n K^2)).
inline double lowerbound_gap(int L, int K, std::int64_t n) {
  return std::sqrt(static_cast<double>(L) / (4.0 * static_cast<double>(n) * K * K));
}

/// Family member w_m: group i holds items (i-1)N+1 .. iN, and item
/// (i-1)N + m[i] is the elevated one. Weights are (eps + gap [elevated]) / 2.
inline Instance gen_lowerbound_member(int L, int K, std::int64_t n, const std::vector<int>& m) {
  if (K < 1 || K > L) throw InstanceError("lower_bound_family: need 1 <= K <= L");
  if (L % K != 0) throw InstanceError("lower_bound_family: N = L/K must be an integer");
  const int N = L / K;
  if (N < 4) throw InstanceError("lower_bound_family: N = L/K must be >= 4");
  if (n < L) throw InstanceError("lower_bound_family: need n >= L");
  if (static_cast<int>(m.size()) != K) {
    throw InstanceError("lower_bound_family: m must have K entries");
  }
  const double eps = 1.0 / (2.0 * K);
  const double gap = lowerbound_gap(L, K, n);
  std::vector<double> w(static_cast<std::size_t>(L), eps / 2.0);
  for (int i = 0; i < K; ++i) {
    if (m[i] < 1 || m[i] > N) {
      throw InstanceError("lower_bound_family: m[" + std::to_string(i) + "] outside [1, N]");
    }
    w[static_cast<std::size_t>(i * N + m[i] - 1)] = (eps + gap) / 2.0;
  }
  return Instance(K, std::move(w));
}

/// Ids of the elevated items of member m, in ascending group order.
inline Action lowerbound_optimal_ids(int L, int K, const std::vector<int>& m) {
  const int N = L / K;
  Action a;
  for (int i = 0; i < K; ++i) a.items.push_back(i * N + m[i]);
  return a;
}

struct FamilyMember {
  std::vector<int> m;
  Instance instance;
};

struct FamilySampling {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kMaxFamilyMembers = 1'000'000;

/// All members m in [N]^K in lexicographic order, or `sampling->count`
/// distinct members drawn under a fixed seed (also lexicographically ordered).
inline std::vector<FamilyMember> enumerate_family(int L, int K, std::int64_t n,
                                                  std::optional<FamilySampling> sampling = std::nullopt) {
  if (K < 1 || L % K != 0) throw InstanceError("lower_bound_family: N = L/K must be an integer");
  const std::uint64_t N = static_cast<std::uint64_t>(L / K);
  std::uint64_t total = 1;
  bool oversized = false;
  for (int i = 0; i < K; ++i) {
    if (total > kMaxFamilyMembers) {
      oversized = true;
      break;
    }
    total *= N;
  }
  oversized = oversized || total > kMaxFamilyMembers;

  auto decode = [&](std::uint64_t code) {
    std::vector<int> m(static_cast<std::size_t>(K));
    for (int i = K - 1; i >= 0; --i) {
      m[i] = static_cast<int>(code % N) + 1;
      code /= N;
    }
    return m;
  };

  std::vector<std::uint64_t> codes;
  if (sampling) {
    if (sampling->count > kMaxFamilyMembers) {
      throw InstanceError("lower_bound_family: sample count exceeds " + std::to_string(kMaxFamilyMembers));
    }
    Engine rng(derive_stream_seed(sampling->seed, 0x5EED));
    if (!oversized && sampling->count >= total) {
      codes.resize(total);
      std::iota(codes.begin(), codes.end(), std::uint64_t{0});
    } else {
      std::set<std::vector<int>> picked;
      while (picked.size() < sampling->count) {
        std::vector<int> m(static_cast<std::size_t>(K));
        for (auto& v : m) v = static_cast<int>(rng() % N) + 1;
        picked.insert(std::move(m));
      }
      std::vector<FamilyMember> out;
      for (const auto& m : picked) out.push_back({m, gen_lowerbound_member(L, K, n, m)});
      return out;
    }
  } else {
    if (oversized) {
      throw InstanceError("lower_bound_family: N^K exceeds " + std::to_string(kMaxFamilyMembers) +
                          " members; request a sampled subset");
    }
    codes.resize(total);
    std::iota(codes.begin(), codes.end(), std::uint64_t{0});
  }
  std::vector<FamilyMember> out;
  out.reserve(codes.size());
  for (std::uint64_t code : codes) {
    auto m = decode(code);
    Instance inst = gen_lowerbound_member(L, K, n, m);
    out.push_back({std::move(m), std::move(inst)});
  }
  return out;
}

/// Builds the instance described by `spec`; `horizon` stands in for a
/// missing `spec.n`.
inline Instance build_instance(const InstanceSpec& spec, std::int64_t horizon) {
  const std::int64_t n = spec.n.value_or(horizon);
  switch (spec.kind) {
    case InstanceKind::kTwoLevel:
      return gen_two_level(spec.L, spec.K, spec.p, spec.delta);
    case InstanceKind::kTheorem3:
      return gen_theorem3(spec.L, spec.K, n, spec.chi);
    case InstanceKind::kLowerBoundFamily: {
      std::vector<int> m = spec.m;
      if (m.empty()) m.assign(static_cast<std::size_t>(std::max(spec.K, 0)), 1);
      return gen_lowerbound_member(spec.L, spec.K, n, m);
    }
    case InstanceKind::kExplicit:
      if (static_cast<int>(spec.weights.size()) != spec.L) {
        throw InstanceError("explicit: weights must have L entries");
      }
      return Instance(spec.K, spec.weights);
  }
  throw InstanceError("unknown instance kind");
}

}  // namespace cascade

#endif  // CASCADE_INSTANCES_HPP
