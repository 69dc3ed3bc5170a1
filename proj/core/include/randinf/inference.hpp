#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "randinf/anova.hpp"
#include "randinf/potential_outcomes.hpp"
#include "randinf/randomization.hpp"

namespace randinf {

struct SupportPoint {
  double s0_sq = 0.0;
  double s1_sq = 0.0;
  FStatistic f_stat = FStatistic::degenerate();
  double probability = 0.0;
  std::uint64_t count = 0;
};

/// Distribution of (S0^2, S1^2, F) over the randomization space. Support
/// points merge assignments whose mean squares agree to 12 significant
/// digits and are ordered by first appearance in the stream.
struct RandomizationSummary {
  std::vector<SupportPoint> support;
  double mean_s0 = 0.0;
  double mean_s1 = 0.0;
  bool is_exact = true;
  std::uint64_t assignment_count = 0;
  std::size_t df_treatment = 0;
  std::size_t df_residual = 0;

  /// P(F > k), strict.
  double probability_f_exceeds(double k) const;
  std::size_t distinct_f_values() const;
};

/// Pure randomization distribution; the table must have sigma_eps = 0.
RandomizationSummary exact_distribution(const PotentialOutcomeTable& table,
                                        const RandomizationSpace& space = {});

struct NullStatus {
  bool neyman_null = false;
  bool fisher_sharp_null = false;
};

NullStatus null_status(const PotentialOutcomeTable& table,
                       double tolerance = kDefaultAdditivityTolerance);

struct TypeOneError {
  double rejection_probability = 0.0;
  double cutoff = 0.0;
  double alpha = 0.0;
  NullStatus null_status;
};

/// Probability that the F-test at level alpha rejects, i.e. P(F > cutoff)
/// with cutoff the 1-alpha quantile of F(df1, df0). The table is never
/// refused for violating a null. Throws Error{InvalidAlpha}.
TypeOneError type1_error(const PotentialOutcomeTable& table, double alpha,
                         const RandomizationSpace& space = {});

/// Same, reusing an already computed distribution.
TypeOneError type1_error(const RandomizationSummary& summary, double alpha,
                         NullStatus status = {});

struct SurvivalCurve {
  std::vector<double> k;
  std::vector<double> p_randomization;
  std::vector<double> p_reference;
};

inline constexpr std::size_t kDefaultCurvePoints = 200;

/// Evaluates both survival functions on an explicit grid.
SurvivalCurve survival_curve(const RandomizationSummary& summary, std::span<const double> grid);
SurvivalCurve survival_curve(const PotentialOutcomeTable& table, std::span<const double> grid,
                             const RandomizationSpace& space = {});
/// Evenly spaced grid on [0, max(2 * F_0.95, largest finite F)].
std::vector<double> default_curve_grid(const RandomizationSummary& summary,
                                       std::size_t points = kDefaultCurvePoints);
SurvivalCurve survival_curve(const PotentialOutcomeTable& table,
                             std::size_t points = kDefaultCurvePoints,
                             const RandomizationSpace& space = {});

struct MonteCarloReport {
  std::uint64_t replications = 0;
  double error_sd = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double cutoff = 0.0;
  double mean_rejection = 0.0;
  double standard_error = 0.0;
  /// Filled only when retention was requested.
  std::vector<double> per_replication;
};

inline constexpr std::uint64_t kDefaultReplications = 2000;
inline constexpr double kDefaultErrorSd = 0.01;

/// Each replication draws iid Normal(0, sigma^2) errors for every
/// potential outcome, then evaluates P(F > cutoff) over the full
/// randomization distribution of the perturbed table. Replication r uses
/// its own generator seeded from (seed, r).
MonteCarloReport monte_carlo_with_errors(const PotentialOutcomeTable& table, double sigma_eps,
                                         std::uint64_t replications, double alpha,
                                         std::uint64_t seed,
                                         const RandomizationSpace& space = {},
                                         bool retain_replications = false);

/// Size of Fisher's randomization test that uses F as the statistic: each
/// assignment in turn is taken as observed, its p-value is P(F >= F_obs)
/// under the enumeration distribution, and the test rejects when p <= alpha.
/// Returns the probability of rejection over the space.
double randomization_test_size(const PotentialOutcomeTable& table, double alpha,
                               const RandomizationSpace& space = {});

/// Order-4 Latin square in the family of the zero-rejection example: the
/// sharp null holds, fertility corrections are constant in t, E(S0^2) =
/// E(S1^2), and F takes two values that both sit below F(3, 6; 0.95).
/// `scale` multiplies the two unit spikes; row and column effects are
/// added to every potential outcome of the row/column.
PotentialOutcomeTable zero_rejection_witness(double scale, std::span<const double> row_effects,
                                             std::span<const double> column_effects);

}  // namespace randinf
