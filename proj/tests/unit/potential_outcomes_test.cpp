#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "randinf/error.hpp"
#include "randinf/io.hpp"
#include "randinf/potential_outcomes.hpp"
#include "support/test_tables.hpp"

namespace randinf {
namespace {

using testing::fixture_table1;
using testing::fixture_table2;
using testing::fixture_table4;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no randinf::Error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(Validate, RejectsWrongUnitCount) {
  TableInput in;
  in.design = Design::Rcb;
  in.num_blocks = 2;
  in.num_treatments = 2;
  in.outcomes = {{{1, 2}, {3, 4}, {5, 6}}, {{1, 2}, {3, 4}, {5, 6}}};
  EXPECT_EQ(code_of([&] { validate(in); }), ErrorCode::DimensionMismatch);
}

TEST(Validate, RejectsNonFinite) {
  TableInput in;
  in.design = Design::Rcb;
  in.num_blocks = 2;
  in.num_treatments = 2;
  in.outcomes = {{{1, 2}, {3, std::numeric_limits<double>::quiet_NaN()}}, {{1, 2}, {3, 4}}};
  EXPECT_EQ(code_of([&] { validate(in); }), ErrorCode::NonFiniteEntry);
  in.outcomes[0][1][1] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { validate(in); }), ErrorCode::NonFiniteEntry);
}

TEST(Validate, RejectsNegativeErrorSd) {
  EXPECT_EQ(code_of([] { PotentialOutcomeTable::rcb(2, 2, std::vector<double>(8, 0.0), -0.1); }),
            ErrorCode::NegativeErrorSd);
}

TEST(Validate, LatinSquareNeedsCubicShape) {
  EXPECT_EQ(code_of([] { PotentialOutcomeTable::latin_square(3, std::vector<double>(26, 0.0)); }),
            ErrorCode::DimensionMismatch);
  EXPECT_NO_THROW(PotentialOutcomeTable::latin_square(3, std::vector<double>(27, 0.0)));
}

TEST(Validate, NestedRoundTrip) {
  const auto t = fixture_table2();
  TableInput in;
  in.design = Design::Ls;
  in.num_treatments = 3;
  in.outcomes = t.nested();
  EXPECT_EQ(validate(in).outcomes()[5], t.outcomes()[5]);
  EXPECT_EQ(t(1, 0, 2), 50.0);
}

TEST(Fixtures, InCodeTablesMatchDataFiles) {
  const std::filesystem::path dir = RANDINF_TEST_DATA_DIR;
  EXPECT_EQ(load_table(dir / "table1.json"), testing::fixture_table1());
  EXPECT_EQ(load_table(dir / "table2.json"), testing::fixture_table2());
  EXPECT_EQ(load_table(dir / "table3.json"), testing::fixture_table3());
  EXPECT_EQ(load_table(dir / "table4.json"), testing::fixture_table4());
}

TEST(Decompose, TableOneComponents) {
  const auto d = decompose(fixture_table1());
  EXPECT_DOUBLE_EQ(d.grand_means[0], 17.5);
  EXPECT_DOUBLE_EQ(d.grand_means[1], 17.5);
  EXPECT_DOUBLE_EQ(d.row_correction(0, 0), -7.5);
  EXPECT_DOUBLE_EQ(d.row_correction(0, 1), -9.0);
  EXPECT_DOUBLE_EQ(d.residual(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(d.residual(1, 1, 1), 23.5);
}

TEST(Decompose, ConstantTableHasNoComponents) {
  const auto t = PotentialOutcomeTable::latin_square(3, std::vector<double>(27, 4.0));
  const auto d = decompose(t);
  for (double r : d.residuals) EXPECT_EQ(r, 0.0);
  for (double r : d.row_corrections) EXPECT_EQ(r, 0.0);
  for (double c : d.column_corrections) EXPECT_EQ(c, 0.0);
  for (double v : d.eta_variances) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(d.has_undefined_correlation);
  EXPECT_DOUBLE_EQ(d.overall_mean, 4.0);
}

TEST(Decompose, TableTwoLatinSquareVariances) {
  const auto d = decompose(fixture_table2());
  EXPECT_NEAR(d.eta_variance_sum(), 313.5555555555556, 1e-9);
  EXPECT_NEAR(d.row_interaction_sum() + d.column_interaction_sum(), 569.9259259259259, 1e-9);
}

void expect_decomposition_properties(const PotentialOutcomeTable& x) {
  const auto d = decompose(x);
  const std::size_t T = x.treatments();
  const std::size_t R = x.rows();

  const auto back = d.reconstruct();
  for (std::size_t k = 0; k < x.outcomes().size(); ++k) {
    ASSERT_NEAR(back.outcomes()[k], x.outcomes()[k], 1e-12 * std::max(1.0, std::fabs(x.outcomes()[k])));
  }
  for (std::size_t t = 0; t < T; ++t) {
    double rows = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
      rows += d.row_correction(i, t);
      double within = 0.0;
      for (std::size_t j = 0; j < T; ++j) within += d.residual(i, j, t);
      ASSERT_NEAR(within, 0.0, 1e-12);
    }
    ASSERT_NEAR(rows, 0.0, 1e-12);
    if (x.design() == Design::Ls) {
      double cols = 0.0;
      for (std::size_t j = 0; j < T; ++j) {
        cols += d.column_correction(j, t);
        double down = 0.0;
        for (std::size_t i = 0; i < T; ++i) down += d.residual(i, j, t);
        ASSERT_NEAR(down, 0.0, 1e-12);
      }
      ASSERT_NEAR(cols, 0.0, 1e-12);
    }
    ASSERT_DOUBLE_EQ(d.correlation(t, t), 1.0);
    for (std::size_t u = 0; u < T; ++u) {
      ASSERT_LE(std::fabs(d.correlation(t, u)), 1.0 + 1e-12);
      ASSERT_DOUBLE_EQ(d.correlation(t, u), d.correlation(u, t));
    }
  }
  // Decomposing the reconstruction gives the same components.
  const auto again = decompose(back);
  for (std::size_t k = 0; k < d.residuals.size(); ++k) {
    ASSERT_NEAR(again.residuals[k], d.residuals[k], 1e-12);
  }
}

TEST(DecomposeProperty, RandomTablesSatisfyIdentities) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> blocks(2, 6), treatments(2, 5), order(3, 6);
  for (int k = 0; k < 600; ++k) expect_decomposition_properties(testing::random_rcb(blocks(rng), treatments(rng), rng));
  for (int k = 0; k < 600; ++k) expect_decomposition_properties(testing::random_ls(order(rng), rng));
}

TEST(Additivity, TableFourIsAdditiveWithZeroShifts) {
  const auto r = check_additivity(fixture_table4());
  ASSERT_TRUE(r.is_additive);
  ASSERT_TRUE(r.treatment_shifts);
  for (double s : *r.treatment_shifts) EXPECT_EQ(s, 0.0);
  EXPECT_TRUE(satisfies_sharp_null(fixture_table4()));
  EXPECT_TRUE(satisfies_neyman_null(fixture_table4()));
}

TEST(Additivity, RecoversShifts) {
  std::mt19937_64 rng(5);
  const auto u = testing::normal_values(12, rng);
  const std::vector<double> tau{0.0, 5.0, 10.0};
  const auto t = testing::additive_table(Design::Rcb, 4, 3, u, tau);
  const auto r = check_additivity(t);
  ASSERT_TRUE(r.is_additive);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR((*r.treatment_shifts)[k], tau[k], 1e-12);
  EXPECT_FALSE(satisfies_neyman_null(t));
  EXPECT_FALSE(satisfies_sharp_null(t));
}

TEST(Additivity, TableTwoIsNotAdditive) {
  const auto r = check_additivity(fixture_table2());
  EXPECT_FALSE(r.is_additive);
  EXPECT_FALSE(r.treatment_shifts);
  EXPECT_GT(r.block_treatment, 0.0);
  EXPECT_GT(r.strict_unit_treatment, 0.0);
  // Neyman's null holds here even though the sharp null does not.
  EXPECT_TRUE(satisfies_neyman_null(fixture_table2()));
  EXPECT_FALSE(satisfies_sharp_null(fixture_table2()));
}

TEST(Additivity, ToleranceIsAbsolute) {
  std::vector<double> x(8, 1.0);
  x[3] += 1e-6;
  const auto t = PotentialOutcomeTable::rcb(2, 2, x);
  EXPECT_FALSE(check_additivity(t).is_additive);
  EXPECT_TRUE(check_additivity(t, 1e-5).is_additive);
}

}  // namespace
}  // namespace randinf
