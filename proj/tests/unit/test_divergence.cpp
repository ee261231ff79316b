#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "cascade/divergence.hpp"

using namespace cascade;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// Expected values below were evaluated with 40-digit mpmath.
TEST(BernoulliKl, ClosedFormValues) {
  EXPECT_EQ(bernoulli_kl(0.3, 0.3), 0.0);
  EXPECT_NEAR(bernoulli_kl(0.0, 0.5), 0.6931471805599453, 1e-15);
  EXPECT_NEAR(bernoulli_kl(0.25, 0.5), 0.13081203594113696, 1e-15);
}

TEST(BernoulliKl, BoundaryConventions) {
  EXPECT_EQ(bernoulli_kl(0.0, 0.0), 0.0);
  EXPECT_EQ(bernoulli_kl(1.0, 1.0), 0.0);
  EXPECT_EQ(bernoulli_kl(0.5, 0.0), kInf);
  EXPECT_EQ(bernoulli_kl(0.5, 1.0), kInf);
  EXPECT_EQ(bernoulli_kl(0.0, 1.0), kInf);
  EXPECT_EQ(bernoulli_kl(1.0, 0.0), kInf);
  EXPECT_NEAR(bernoulli_kl(1.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isfinite(bernoulli_kl(0.0, 0.999)));
}

TEST(BernoulliKl, NonnegativeWithEqualityOnDiagonal) {
  for (int i = 1; i <= 200; ++i) {
    for (int j = 1; j <= 200; ++j) {
      const double p = i / 201.0, q = j / 201.0;
      const double d = bernoulli_kl(p, q);
      ASSERT_GE(d, 0.0);
      ASSERT_EQ(d == 0.0, i == j) << p << " " << q;
    }
  }
}

TEST(ExplorationThreshold, Values) {
  EXPECT_EQ(exploration_threshold(1.0).value(), 0.0);
  EXPECT_EQ(exploration_threshold(2.0).value(), 0.0);  // log 2 + 3 log log 2 < 0
  EXPECT_NEAR(exploration_threshold(std::exp(std::exp(1.0))).value(), std::exp(1.0) + 3.0, 1e-12);
  EXPECT_NEAR(exploration_threshold(10.0).value(), 4.804682428737913, 1e-12);
  EXPECT_THROW(exploration_threshold(0.5), std::invalid_argument);
}

TEST(ExplorationThreshold, LiteralFormIsLogOfDefault) {
  for (double t : {3.0, 10.0, 1e3, 1e6}) {
    const double inner = exploration_threshold(t).value();
    const double lit = exploration_threshold(t, ThresholdForm::kLiteralDoubleLog).value();
    EXPECT_NEAR(lit, inner > 1.0 ? std::log(inner) : 0.0, 1e-15);
  }
}

TEST(ExplorationThreshold, NondecreasingFromRoundTwo) {
  double prev = 0.0;
  for (int t = 2; t < 100000; ++t) {
    const double v = exploration_threshold(t).value();
    ASSERT_GE(v, prev);
    prev = v;
  }
}

TEST(KlUcbIndex, SpecialCases) {
  EXPECT_EQ(klucb_index(0.3, 0, ExplorationThreshold{5.0}), 1.0);
  EXPECT_EQ(klucb_index(1.0, 5, ExplorationThreshold{3.0}), 1.0);
  EXPECT_EQ(klucb_index(0.4, 3, ExplorationThreshold{0.0}), 0.4);
  EXPECT_NEAR(klucb_index(0.0, 1, ExplorationThreshold{std::log(2.0)}), 0.5, 1e-12);
}

TEST(KlUcbIndex, ZeroMeanMatchesClosedForm) {
  for (double theta : {0.01, 0.5, 1.0, 3.0, 7.5}) {
    for (std::int64_t count : {1, 2, 10, 1000}) {
      const double expected = 1.0 - std::exp(-theta / static_cast<double>(count));
      EXPECT_NEAR(klucb_index(0.0, count, ExplorationThreshold{theta}), expected, 1e-12);
    }
  }
}

TEST(KlUcbIndex, CertificateAndMonotonicity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t count = 1 + static_cast<std::int64_t>(rng() % 500);
    const double mean = static_cast<double>(rng() % (count + 1)) / static_cast<double>(count);
    const double theta = 15.0 * unit(rng);
    const double u = klucb_index(mean, count, ExplorationThreshold{theta});
    ASSERT_GE(u, mean);
    ASSERT_LE(u, 1.0);
    ASSERT_LE(u, klucb_upper_bound(mean, theta / count) + 1e-12);
    if (mean < 1.0 && u < 1.0 - 1e-6 && theta > 0.0) {
      ASSERT_NEAR(bernoulli_kl(mean, u), theta / count, 1e-8);
    }
    // More exploration never lowers the index; more data never raises it.
    ASSERT_GE(klucb_index(mean, count, ExplorationThreshold{theta * 1.1}), u);
    ASSERT_LE(klucb_index(mean, count + 1, ExplorationThreshold{theta}), u);
  }
}

TEST(Ucb1Index, Values) {
  EXPECT_NEAR(ucb1_index(0.2, 6, std::exp(1.0), 1.5), 0.7, 1e-12);
  EXPECT_EQ(ucb1_index(0.9, 1, 100.0, 1.5), 1.0);
  EXPECT_EQ(ucb1_index(0.5, 4, 1.0, 1.5), 0.5);
  EXPECT_EQ(ucb1_index(0.5, 0, 10.0), 1.0);
}

TEST(Indices, BothLieBetweenMeanAndOne) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t count = static_cast<std::int64_t>(rng() % 200);
    const double mean = count == 0 ? 0.0 : static_cast<double>(rng() % (count + 1)) / count;
    const double t = 1.0 + static_cast<double>(rng() % 100000);
    const double kl = klucb_index(mean, count, exploration_threshold(t));
    const double ucb = ucb1_index(mean, count, t);
    EXPECT_GE(kl, mean);
    EXPECT_LE(kl, 1.0);
    EXPECT_GE(ucb, mean);
    EXPECT_LE(ucb, 1.0);
  }
}
