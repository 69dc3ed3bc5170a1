#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "randinf/anova.hpp"
#include "randinf/error.hpp"
#include "randinf/randomization.hpp"
#include "support/test_tables.hpp"

namespace randinf {
namespace {

using testing::relative_error;

TEST(Observe, RevealsAssignedOutcomes) {
  const auto t = testing::fixture_table1();
  const Assignment identity(Design::Rcb, 2, 2, {0, 1, 0, 1});
  const auto e = observe(t, identity);
  // y_i(t) layout: [i * T + t]
  EXPECT_EQ(e.observed, (std::vector<double>{10, 2, 20, 50}));
  const Assignment swapped(Design::Rcb, 2, 2, {1, 0, 1, 0});
  EXPECT_EQ(observe(t, swapped).observed, (std::vector<double>{10, 15, 30, 3}));
}

TEST(Observe, AddsErrorsOnlyToRevealedEntries) {
  const auto t = testing::fixture_table1();
  std::vector<double> errs(8);
  for (std::size_t k = 0; k < 8; ++k) errs[k] = 0.1 * static_cast<double>(k + 1);
  const auto e = observe(t, Assignment(Design::Rcb, 2, 2, {0, 1, 0, 1}), errs);
  EXPECT_NEAR(e.observed[0], 10.1, 1e-12);  // X_11(1) + eps at [0]
  EXPECT_NEAR(e.observed[1], 2.4, 1e-12);   // X_12(2) + eps at [3]
}

TEST(Observe, ShapeMismatch) {
  const auto t = testing::fixture_table1();
  try {
    observe(t, Assignment(Design::Ls, 3, 3, {0, 1, 2, 1, 2, 0, 2, 0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
  EXPECT_THROW(observe(t, Assignment(Design::Rcb, 2, 2, {0, 1, 0, 1}), std::vector<double>(3)),
               Error);
}

TEST(Anova, DegreesOfFreedom) {
  EXPECT_EQ(residual_df(Design::Rcb, 4, 3), 6u);
  EXPECT_EQ(residual_df(Design::Ls, 4, 4), 6u);
  EXPECT_EQ(residual_df(Design::Ls, 3, 3), 2u);
}

TEST(Anova, ConstantTableIsDegenerate) {
  const auto t = PotentialOutcomeTable::latin_square(3, std::vector<double>(27, 2.5));
  auto s = enumerate_latin_squares(3);
  while (auto a = s->next()) {
    const auto r = anova(t, *a);
    EXPECT_EQ(r.s0_sq, 0.0);
    EXPECT_EQ(r.s1_sq, 0.0);
    EXPECT_EQ(r.f_stat.kind(), FStatistic::Kind::Degenerate);
    EXPECT_FALSE(r.f_stat.exceeds(0.0));
    EXPECT_FALSE(r.welch_stat);
  }
}

TEST(Anova, PerfectFitGivesInfiniteF) {
  // Pure treatment effect, no unit variation.
  std::vector<double> x(27);
  for (std::size_t k = 0; k < 27; ++k) x[k] = static_cast<double>(k % 3);
  const auto t = PotentialOutcomeTable::latin_square(3, x);
  const auto r = anova(t, Assignment(Design::Ls, 3, 3, {0, 1, 2, 1, 2, 0, 2, 0, 1}));
  EXPECT_EQ(r.f_stat.kind(), FStatistic::Kind::Infinite);
  EXPECT_TRUE(r.f_stat.exceeds(1e300));
  EXPECT_DOUBLE_EQ(*r.welch_stat, 1.0);
}

TEST(FStatistic, TextForms) {
  EXPECT_EQ(FStatistic::infinite().to_string(), "inf");
  EXPECT_EQ(FStatistic::degenerate().to_string(), "degenerate");
  EXPECT_TRUE(std::isnan(FStatistic::degenerate().value()));
  EXPECT_FALSE(FStatistic::finite(2.0).exceeds(2.0));
  EXPECT_TRUE(FStatistic::finite(2.0).exceeds(1.999));
}

TEST(AnovaProperty, MatchesNaiveIndicatorOracle) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 300; ++k) {
    const bool ls = k % 2 == 1;
    const std::size_t T = ls ? 3 + k % 4 : 2 + k % 4;
    const std::size_t rows = ls ? T : 2 + k % 5;
    const auto table = ls ? testing::random_ls(T, rng) : testing::random_rcb(rows, T, rng);
    auto stream = ls ? sample_latin_squares(T, 3, rng()) : sample_rcb(rows, T, 3, rng());
    while (auto a = stream->next()) {
      const auto fast = anova(table, *a);
      const auto slow = testing::naive_mean_squares(table, *a);
      ASSERT_LT(relative_error(fast.s0_sq, slow.s0_sq), 1e-10);
      ASSERT_LT(relative_error(fast.s1_sq, slow.s1_sq), 1e-10);
      ASSERT_TRUE(fast.f_stat.is_finite());
      ASSERT_LT(relative_error(fast.f_stat.value(), slow.s1_sq / slow.s0_sq), 1e-9);
    }
  }
}

TEST(AnovaProperty, LocationAndScaleInvariance) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const auto table = testing::random_ls(4, rng);
    std::vector<double> moved(table.outcomes().begin(), table.outcomes().end());
    for (double& x : moved) x = 3.5 * x - 40.0;
    const auto other = table.with_outcomes(moved);
    auto s = sample_latin_squares(4, 2, rng());
    while (auto a = s->next()) {
      const auto f = anova(table, *a).f_stat.value();
      const auto g = anova(other, *a).f_stat.value();
      ASSERT_LT(relative_error(f, g), 1e-9);
    }
  }
}

TEST(AnovaProperty, PooledSumIsConstantUnderSharpNull) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const auto table = testing::random_sharp_null(Design::Rcb, 3, 3, rng);
    double first = -1.0;
    auto s = enumerate_rcb(3, 3);
    while (auto a = s->next()) {
      const auto r = anova(table, *a);
      const double pooled = 2.0 * r.s1_sq + 4.0 * r.s0_sq;
      ASSERT_LT(relative_error(pooled, r.pooled), 1e-12);
      if (first < 0.0) first = pooled;
      ASSERT_LT(relative_error(pooled, first), 1e-9);
    }
  }
}

}  // namespace
}  // namespace randinf
