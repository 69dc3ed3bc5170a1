#include <gtest/gtest.h>

#include <cmath>

#include "randinf/error.hpp"
#include "randinf/fdist.hpp"

namespace randinf {
namespace {

TEST(FDist, FrozenSurvivalValues) {
  EXPECT_NEAR(f_survival({3, 6}, 4.76), 0.04993798252187672, 1e-12);
  EXPECT_NEAR(f_survival({2, 2}, 1.0), 0.5, 1e-14);
  EXPECT_NEAR(f_survival({5, 7}, 2.5), 0.13200622360784067, 1e-12);
  EXPECT_NEAR(f_survival({10, 3}, 0.3), 0.9355008904418703, 1e-12);
  EXPECT_EQ(f_survival({3, 6}, 0.0), 1.0);
}

TEST(FDist, FrozenQuantiles) {
  EXPECT_NEAR(f_quantile({3, 6}, 0.95), 4.757062663089414, 1e-9);
  EXPECT_NEAR(f_quantile({2, 2}, 0.9), 9.0, 1e-9);
  EXPECT_NEAR(f_quantile({2, 2}, 0.95), 19.0, 1e-9);
  EXPECT_NEAR(f_quantile({1, 1}, 0.99), 4052.1806954768217, 1e-6);
  EXPECT_NEAR(f_quantile({4, 9}, 0.5), 0.9058038543968255, 1e-9);
  EXPECT_NEAR(f_quantile({1, 1}, 0.5), 1.0, 1e-12);
  EXPECT_THROW(f_quantile({3, 6}, 0.0), Error);
}

TEST(FDist, IncompleteBetaEdges) {
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
  EXPECT_NEAR(regularized_incomplete_beta(1.0, 1.0, 0.3), 0.3, 1e-14);
  // I_x(a, b) = 1 - I_{1-x}(b, a)
  EXPECT_NEAR(regularized_incomplete_beta(2.5, 4.0, 0.2),
              1.0 - regularized_incomplete_beta(4.0, 2.5, 0.8), 1e-13);
}

TEST(FDist, Errors) {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ValidationError;
  };
  EXPECT_EQ(code([] { f_survival({3, 6}, -1.0); }), ErrorCode::NegativeArgument);
  EXPECT_EQ(code([] { f_quantile({3, 6}, 1.5); }), ErrorCode::InvalidProbability);
  EXPECT_EQ(code([] { f_quantile({3, 6}, -0.1); }), ErrorCode::InvalidProbability);
  EXPECT_THROW(f_survival({0, 6}, 1.0), Error);
}

TEST(FDistProperty, MonotoneSurvival) {
  for (int d1 : {1, 2, 3, 5, 10}) {
    for (int d2 : {1, 2, 6, 20}) {
      double prev = 1.0;
      for (double x = 0.05; x < 30.0; x *= 1.3) {
        const double s = f_survival({d1, d2}, x);
        ASSERT_LE(s, prev + 1e-15);
        ASSERT_GE(s, 0.0);
        prev = s;
      }
    }
  }
}

TEST(FDistProperty, ReciprocalSymmetry) {
  // P(F(d1,d2) > x) = P(F(d2,d1) < 1/x)
  for (int d1 : {1, 3, 7}) {
    for (int d2 : {2, 5, 11}) {
      for (double x : {0.2, 0.9, 1.7, 6.0}) {
        ASSERT_NEAR(f_survival({d1, d2}, x), 1.0 - f_survival({d2, d1}, 1.0 / x), 1e-12);
      }
    }
  }
}

TEST(FDistProperty, QuantileInvertsSurvival) {
  for (int d1 : {1, 2, 3, 6}) {
    for (int d2 : {2, 6, 15}) {
      for (int k = 1; k <= 99; ++k) {
        const double p = k / 100.0;
        const double q = f_quantile({d1, d2}, p);
        ASSERT_NEAR(1.0 - f_survival({d1, d2}, q), p, 1e-8) << d1 << "," << d2 << " p=" << p;
      }
    }
  }
}

}  // namespace
}  // namespace randinf
