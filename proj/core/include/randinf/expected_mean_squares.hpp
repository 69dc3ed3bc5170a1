#pragma once

#include <cstddef>
#include <optional>

#include "randinf/potential_outcomes.hpp"

namespace randinf {

/// Expectations of S0^2 and S1^2 over the randomization and the technical
/// errors, in the general form (sigma_eta^2(t) and r(t,t') may vary with t).
struct ExpectedMeanSquares {
  double e_s0 = 0.0;
  double e_s1 = 0.0;
  /// e_s0 without the block (row/column) by treatment interaction term.
  double e_s0_neyman = 0.0;
  double interaction_term = 0.0;
  /// RCB: N/(T-1) Sum_t {Xbar..(t) - Xbar..(.)}^2; LS uses T in place of N.
  double treatment_effect_term = 0.0;
  double difference = 0.0;
  /// Lower bound on e_s0 - e_s1 under Neyman's null; Latin squares only.
  std::optional<double> ls_lower_bound;
};

ExpectedMeanSquares expected_ms(const PotentialOutcomeTable& table);

/// The historical E(S0^2) that drops the interaction term.
double neyman_historical_e_s0(const PotentialOutcomeTable& table);

/// Components of E(S0^2) - E(S1^2) for a Latin square. The difference
/// under Neyman's null is
///   (interaction_sum + neg_eta_variance_sum + correlation_term) / (T-1)^2.
struct LsDifferenceDecomposition {
  /// Sum_i Sum_t {R_i(t)-Rbar_i}^2 + Sum_j Sum_t {C_j(t)-Cbar_j}^2
  double interaction_sum = 0.0;
  /// -Sum_t sigma_eta^2(t)
  double neg_eta_variance_sum = 0.0;
  /// 1/(T-1) Sum_{t!=t'} r(t,t') sqrt(sigma^2(t) sigma^2(t'))
  double correlation_term = 0.0;
  /// interaction_sum - T sigma^2 (1 - r) with sigma^2 and r replaced by
  /// their averages over treatments; equals (T-1)^2 times the difference
  /// when both are constant.
  double constant_case_difference = 0.0;
};

/// Throws Error{WrongDesign} for RCB tables.
LsDifferenceDecomposition ls_difference_decomposition(const PotentialOutcomeTable& table);

struct MeanDifferenceVariance {
  /// Xbar..(t) - Xbar..(t'), the quantity the observed difference estimates.
  double estimate_is_unbiased_for = 0.0;
  double variance = 0.0;
};

/// Randomization variance of the observed treatment-mean difference.
/// Treatments are zero-based. Throws Error{SameTreatment} when t == u.
MeanDifferenceVariance mean_difference_variance(const PotentialOutcomeTable& table,
                                                std::size_t t, std::size_t u);

}  // namespace randinf
