#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "cascade/cascade_core.hpp"
#include "cascade/instances.hpp"
#include "support/oracles.hpp"

using namespace cascade;

TEST(Instance, RejectsBadParameters) {
  EXPECT_THROW(Instance(0, {0.5}), InstanceError);
  EXPECT_THROW(Instance(3, {0.5, 0.5}), InstanceError);
  EXPECT_THROW(Instance(1, {0.5, 1.5}), InstanceError);
  EXPECT_THROW(Instance(1, {-0.1}), InstanceError);
  EXPECT_THROW(Instance(1, {}), InstanceError);
}

TEST(Instance, ValidateAction) {
  const Instance inst(2, {0.1, 0.2, 0.3});
  EXPECT_NO_THROW(inst.validate(Action{{3, 1}}));
  EXPECT_THROW(inst.validate(Action{{1}}), std::invalid_argument);
  EXPECT_THROW(inst.validate(Action{{1, 1}}), std::invalid_argument);
  EXPECT_THROW(inst.validate(Action{{0, 1}}), std::invalid_argument);
  EXPECT_THROW(inst.validate(Action{{4, 1}}), std::invalid_argument);
}

TEST(OptimalAction, SortsByAttractionThenId) {
  EXPECT_EQ(optimal_action(Instance(2, {0.3, 0.9, 0.5})), (Action{{2, 3}}));
  EXPECT_EQ(optimal_action(Instance(2, {0.5, 0.5, 0.5})), (Action{{1, 2}}));
  EXPECT_EQ(optimal_action(gen_theorem3(20, 3, 1000, 4.0)), (Action{{1, 2, 3}}));
}

TEST(OptimalAction, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int L = 1 + static_cast<int>(rng() % 10);
    const int K = 1 + static_cast<int>(rng() % std::min(L, 5));
    std::vector<double> w(static_cast<std::size_t>(L));
    for (auto& v : w) v = (rng() % 5 == 0) ? 0.5 : uniform01(rng);  // some ties
    const Instance inst(K, w);
    EXPECT_NEAR(click_probability(inst, optimal_action(inst)), oracle::best_click_probability(w, K), 1e-15);
  }
}

TEST(ClickProbability, Values) {
  EXPECT_EQ(click_probability(Instance(2, {0.0, 0.0, 0.0}), Action{{1, 2}}), 0.0);
  EXPECT_DOUBLE_EQ(click_probability(Instance(2, {0.5, 0.5, 0.1}), Action{{1, 2}}), 0.75);
  EXPECT_DOUBLE_EQ(click_probability(Instance(1, {0.37, 0.2}), Action{{1}}), 0.37);
}

TEST(ClickProbability, PermutationInvariant) {
  const Instance inst(4, {0.11, 0.73, 0.42, 0.05, 0.9, 0.31});
  std::vector<int> items{2, 5, 1, 6};
  const double base = click_probability(inst, Action{items});
  const double base_regret = regret_increment(inst, Action{items});
  std::sort(items.begin(), items.end());
  do {
    EXPECT_EQ(click_probability(inst, Action{items}), base);
    EXPECT_EQ(regret_increment(inst, Action{items}), base_regret);
  } while (std::next_permutation(items.begin(), items.end()));
}

TEST(SampleRound, DeterministicExtremes) {
  Engine rng(1);
  const Instance zeros(3, {0.0, 0.0, 0.0, 0.0});
  const auto none = sample_round(zeros, Action{{4, 2, 1}}, rng);
  EXPECT_FALSE(none.clicked());
  EXPECT_EQ(none.observed, (std::vector<std::uint8_t>{0, 0, 0}));

  const Instance ones(3, {1.0, 1.0, 1.0});
  const auto first = sample_round(ones, Action{{2, 3, 1}}, rng);
  EXPECT_EQ(first.click_position, 1);
  EXPECT_EQ(first.observed, (std::vector<std::uint8_t>{1}));
}

TEST(SampleRound, OutcomeShapeInvariant) {
  Engine rng(5);
  const Instance inst(4, {0.3, 0.1, 0.6, 0.2, 0.4});
  for (int i = 0; i < 10000; ++i) {
    const auto out = sample_round(inst, Action{{5, 2, 4, 1}}, rng);
    if (out.click_position) {
      ASSERT_EQ(out.observed.size(), static_cast<std::size_t>(*out.click_position));
      ASSERT_EQ(out.observed.back(), 1);
      ASSERT_EQ(std::accumulate(out.observed.begin(), out.observed.end(), 0), 1);
    } else {
      ASSERT_EQ(out.observed.size(), 4u);
      ASSERT_EQ(std::accumulate(out.observed.begin(), out.observed.end(), 0), 0);
    }
  }
}

TEST(SampleRound, PositionFrequenciesWithinThreeSigma) {
  // All items at 0.5, K = 3: P(C = k) = 2^-k, P(no click) = 1/8.
  Engine rng(2024);
  const Instance inst(3, {0.5, 0.5, 0.5});
  const int draws = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < draws; ++i) {
    const auto out = sample_round(inst, Action{{1, 2, 3}}, rng);
    counts[out.click_position ? *out.click_position - 1 : 3]++;
  }
  const double probs[] = {0.5, 0.25, 0.125, 0.125};
  for (int k = 0; k < 4; ++k) {
    const double sigma = std::sqrt(draws * probs[k] * (1 - probs[k]));
    EXPECT_LE(std::abs(counts[k] - draws * probs[k]), 3 * sigma) << "position " << k + 1;
  }
}

TEST(RegretIncrement, Values) {
  const Instance inst(1, {0.5, 0.25});
  EXPECT_EQ(regret_increment(inst, optimal_action(inst)), 0.0);
  EXPECT_DOUBLE_EQ(regret_increment(inst, Action{{2}}), 0.25);

  // Two-level instance, action made of K suboptimal items.
  const double p = 0.3, delta = 0.1;
  const int K = 3;
  const Instance two = gen_two_level(7, K, p, delta);
  const double expected = std::pow(1 - p + delta, K) - std::pow(1 - p, K);
  EXPECT_NEAR(regret_increment(two, Action{{4, 5, 6}}), expected, 1e-15);
}

TEST(RegretIncrement, NonnegativeOverEveryAction) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int L = 2 + static_cast<int>(rng() % 7);
    const int K = 1 + static_cast<int>(rng() % L);
    std::vector<double> w(static_cast<std::size_t>(L));
    for (auto& v : w) v = uniform01(rng);
    const Instance inst(K, w);
    oracle::for_each_subset(L, K, [&](const std::vector<int>& s) {
      EXPECT_GE(regret_increment(inst, Action{s}), 0.0);
      EXPECT_GE(doc_regret_increment(inst, Action{s}), 0.0);
    });
  }
}

TEST(DocRegretIncrement, Values) {
  const Instance inst(2, {0.5, 0.25, 0.25});
  EXPECT_EQ(doc_regret_increment(inst, Action{{1, 2}}), 0.0);
  EXPECT_EQ(doc_regret_increment(inst, Action{{2, 1}}), 0.0);
  EXPECT_DOUBLE_EQ(doc_regret_increment(inst, Action{{2, 3}}), 0.25);
}

TEST(Reduction, CascadeRegretDominatesScaledDocumentRegret) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int K = 1 + static_cast<int>(rng() % 4);
    const int L = K + 1 + static_cast<int>(rng() % 5);
    const double eps = 1.0 / (2.0 * K);
    std::vector<double> w(static_cast<std::size_t>(L));
    for (auto& v : w) v = eps * uniform01(rng);
    const Instance inst(K, w);
    oracle::for_each_subset(L, K, [&](const std::vector<int>& s) {
      const double r = regret_increment(inst, Action{s});
      const double doc = doc_regret_increment(inst, Action{s});
      ASSERT_GE(r - std::pow(1 - eps, K - 1) * doc, -1e-12);
      ASSERT_GE(r - std::pow(1 - eps, K) * doc, -1e-12);
    });
  }
}
