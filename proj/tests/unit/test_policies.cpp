#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cascade/experiment.hpp"
#include "cascade/policies.hpp"
#include "support/oracles.hpp"

using namespace cascade;

TEST(SelectAction, TopKWithSmallerIdOnTies) {
  const std::vector<double> idx{0.2, 0.9, 0.9, 0.1, 0.5};
  EXPECT_EQ(select_action(idx, 3), (Action{{2, 3, 5}}));
  EXPECT_EQ(select_action(idx, 1), (Action{{2}}));
  EXPECT_EQ(select_action(std::vector<double>(4, 1.0), 2), (Action{{1, 2}}));
  EXPECT_THROW(select_action(idx, 0), std::invalid_argument);
  EXPECT_THROW(select_action(idx, 6), std::invalid_argument);
}

TEST(SelectAction, TiebreakKeysOnlyBreakTies) {
  const std::vector<double> idx{0.5, 0.5, 0.5, 0.9};
  const std::vector<double> keys{0.1, 0.7, 0.3, 0.0};
  EXPECT_EQ(select_action(idx, 3, keys), (Action{{4, 1, 3}}));
}

TEST(PolicyState, UpdateFromClickAndNoClick) {
  PolicyState s(4);
  s.update(Action{{3, 1}}, RoundOutcome{2, {0, 1}});
  EXPECT_EQ(s.pulls(3), 1);
  EXPECT_EQ(s.pulls(1), 1);
  EXPECT_EQ(s.mean(3), 0.0);
  EXPECT_EQ(s.mean(1), 1.0);
  EXPECT_EQ(s.round(), 2);

  s.update(Action{{1, 2}}, RoundOutcome{std::nullopt, {0, 0}});
  EXPECT_EQ(s.pulls(1), 2);
  EXPECT_EQ(s.mean(1), 0.5);
  EXPECT_EQ(s.pulls(2), 1);
  EXPECT_EQ(s.pulls(4), 0);
}

TEST(PolicyState, RejectsInconsistentOutcome) {
  PolicyState s(3);
  EXPECT_THROW(s.update(Action{{1, 2}}, RoundOutcome{2, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(s.update(Action{{1, 2}}, RoundOutcome{1, {0}}), std::invalid_argument);
  EXPECT_THROW(s.update(Action{{1, 2}}, RoundOutcome{std::nullopt, {0}}), std::invalid_argument);
  EXPECT_THROW(s.update(Action{{1}}, RoundOutcome{2, {0, 1}}), std::invalid_argument);
  EXPECT_EQ(s.round(), 1);
}

TEST(PolicyState, UpdateStateLeavesInputUntouched) {
  const PolicyState s(2);
  const PolicyState next = update_state(s, Action{{2}}, RoundOutcome{1, {1}});
  EXPECT_EQ(s.pulls(2), 0);
  EXPECT_EQ(next.pulls(2), 1);
}

TEST(Step, BookkeepingInvariants) {
  const Instance inst = gen_two_level(12, 3, 0.3, 0.1);
  for (IndexKind kind : {IndexKind::kKlUcb, IndexKind::kUcb1, IndexKind::kUniform, IndexKind::kOracle}) {
    IndexRule rule;
    rule.kind = kind;
    PolicyState s(inst.num_items());
    Engine rng = make_stream(4, 0);
    std::int64_t examined = 0, clicks = 0;
    for (int t = 1; t <= 3000; ++t) {
      const StepResult r = step(s, rule, inst, rng);
      ASSERT_EQ(r.action.size(), 3u);
      ASSERT_GE(r.regret, 0.0);
      examined += static_cast<std::int64_t>(r.outcome.examined());
      clicks += r.outcome.clicked() ? 1 : 0;
    }
    std::int64_t pull_sum = 0, click_sum = 0;
    for (int e = 1; e <= inst.num_items(); ++e) {
      pull_sum += s.pulls(e);
      click_sum += s.clicks(e);
      ASSERT_GE(s.mean(e), 0.0);
      ASSERT_LE(s.mean(e), 1.0);
    }
    EXPECT_EQ(pull_sum, examined) << to_string(kind);
    EXPECT_EQ(click_sum, clicks) << to_string(kind);
    EXPECT_EQ(s.round(), 3001);
  }
}

TEST(Step, KlUcbExploresEveryItemOnAllZeroInstance) {
  // With no clicks ever, every index stays above the mean and the whole list is
  // observed each round, so every item must be shown repeatedly.
  const Instance inst(3, std::vector<double>(10, 0.0));
  IndexRule rule;
  PolicyState s(10);
  Engine rng = make_stream(0, 0);
  for (int t = 0; t < 200; ++t) step(s, rule, inst, rng);
  for (int e = 1; e <= 10; ++e) EXPECT_GE(s.pulls(e), 50) << e;
}

TEST(Step, FirstRoundsCoverUnseenItems) {
  const Instance inst(2, std::vector<double>(6, 0.0));
  PolicyState s(6);
  Engine rng = make_stream(0, 0);
  IndexRule rule;
  for (int t = 0; t < 3; ++t) step(s, rule, inst, rng);
  for (int e = 1; e <= 6; ++e) EXPECT_EQ(s.pulls(e), 1);
}

TEST(Step, OracleHasZeroRegret) {
  const Instance inst = gen_theorem3(16, 4, 5000, 4.0);
  IndexRule rule;
  rule.kind = IndexKind::kOracle;
  PolicyState s(16);
  Engine rng = make_stream(1, 1);
  for (int t = 0; t < 1000; ++t) ASSERT_EQ(step(s, rule, inst, rng).regret, 0.0);
}

TEST(SelectKlucbAction, PrunedSelectionMatchesFullIndexScan) {
  std::mt19937_64 gen(123);
  for (int trial = 0; trial < 200; ++trial) {
    const int L = 2 + static_cast<int>(gen() % 40);
    const int K = 1 + static_cast<int>(gen() % L);
    std::vector<double> w(static_cast<std::size_t>(L));
    for (auto& v : w) v = 0.3 * uniform01(gen);
    const Instance inst(K, w);
    PolicyState s(L);
    Engine rng = make_stream(trial, 0);
    IndexRule rule;
    const int rounds = 1 + static_cast<int>(gen() % 400);
    for (int t = 0; t < rounds; ++t) {
      PolicyState copy = s;
      Engine unused(0);
      const auto full = select_action(compute_indices(copy, rule, inst, unused), K);
      const auto pruned = select_klucb_action(s, K, exploration_threshold(static_cast<double>(s.round())));
      ASSERT_EQ(pruned, full) << "L=" << L << " K=" << K << " t=" << t;
      s.update(pruned, sample_round(inst, pruned, rng));
    }
  }
}

TEST(KlUcb, SingleSlotMatchesPlainArmedBandit) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const std::vector<double> w{0.1, 0.25, 0.2, 0.05, 0.3, 0.28};
    const Instance inst(1, w);
    PolicyState s(static_cast<int>(w.size()));
    IndexRule rule;
    Engine a = make_stream(seed, 0);
    Engine b = make_stream(seed, 0);
    oracle::LArmedKlUcb ref(w);
    for (int t = 0; t < 10000; ++t) {
      const StepResult r = step(s, rule, inst, a);
      ASSERT_EQ(r.action.items.front(), ref.play(b)) << "round " << t + 1;
    }
  }
}

TEST(Step, DeterministicForSameStream) {
  const Instance inst = gen_two_level(20, 4, 0.2, 0.05);
  for (IndexKind kind : {IndexKind::kKlUcb, IndexKind::kUcb1, IndexKind::kUniform}) {
    IndexRule rule;
    rule.kind = kind;
    PolicyState s1(20), s2(20);
    Engine r1 = make_stream(9, 2), r2 = make_stream(9, 2);
    for (int t = 0; t < 500; ++t) {
      ASSERT_EQ(step(s1, rule, inst, r1).action, step(s2, rule, inst, r2).action);
    }
  }
}

TEST(Step, RandomTiebreakStillPrefersLargerIndex) {
  const Instance inst(2, {0.0, 0.0, 0.0, 0.0});
  IndexRule rule;
  rule.random_tiebreak = true;
  PolicyState s(4);
  Engine rng = make_stream(5, 0);
  // Round 1 is a four-way tie at 1. In round 2 the two unseen items still
  // score 1 while the seen ones score 0, so no item can be shown twice.
  step(s, rule, inst, rng);
  step(s, rule, inst, rng);
  for (int e = 1; e <= 4; ++e) EXPECT_EQ(s.pulls(e), 1) << e;
}

TEST(IndexRule, Validate) {
  IndexRule rule;
  rule.kind = IndexKind::kUcb1;
  rule.ucb1_scale = 1.0;
  EXPECT_THROW(rule.validate(), std::invalid_argument);
  rule.ucb1_scale = 1.5;
  EXPECT_NO_THROW(rule.validate());
}
