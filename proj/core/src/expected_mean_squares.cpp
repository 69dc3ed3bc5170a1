#include "randinf/expected_mean_squares.hpp"

#include <cmath>

#include "randinf/compensated_sum.hpp"
#include "randinf/error.hpp"

namespace randinf {

namespace {

double treatment_spread(const Decomposition& d) {
  CompensatedSum s;
  for (double g : d.grand_means) s.add((g - d.overall_mean) * (g - d.overall_mean));
  return s.value();
}

}  // namespace

ExpectedMeanSquares expected_ms(const PotentialOutcomeTable& table) {
  const Decomposition d = decompose(table);
  const double T = static_cast<double>(table.treatments());
  const double sigma_eps_sq = table.technical_error_sd() * table.technical_error_sd();
  const double var_sum = d.eta_variance_sum();
  const double cross = d.correlation_cross_sum();

  ExpectedMeanSquares e;
  if (table.design() == Design::Rcb) {
    const double N = static_cast<double>(table.rows());
    const double common = sigma_eps_sq + var_sum / T + cross / (T * (T - 1) * (T - 1));
    e.interaction_term = d.row_interaction_sum() / ((N - 1) * (T - 1));
    e.treatment_effect_term = N / (T - 1) * treatment_spread(d);
    e.e_s0_neyman = common;
    e.e_s0 = common + e.interaction_term;
    e.e_s1 = common + e.treatment_effect_term;
  } else {
    const double tm1 = T - 1;
    const double interaction_sum = d.row_interaction_sum() + d.column_interaction_sum();
    // The triple sum over (i, j, t) counts each row and column term T times.
    e.interaction_term = interaction_sum / (tm1 * tm1);
    e.treatment_effect_term = T / tm1 * treatment_spread(d);
    e.e_s0_neyman = sigma_eps_sq + (T - 2) / (tm1 * tm1) * var_sum + 2.0 / (tm1 * tm1 * tm1) * cross;
    e.e_s0 = e.e_s0_neyman + e.interaction_term;
    e.e_s1 = sigma_eps_sq + var_sum / tm1 + cross / (tm1 * tm1 * tm1) + e.treatment_effect_term;
    e.ls_lower_bound = interaction_sum / (tm1 * tm1) - T / (tm1 * tm1 * tm1) * var_sum;
  }
  e.difference = e.e_s0 - e.e_s1;
  return e;
}

double neyman_historical_e_s0(const PotentialOutcomeTable& table) {
  return expected_ms(table).e_s0_neyman;
}

LsDifferenceDecomposition ls_difference_decomposition(const PotentialOutcomeTable& table) {
  if (table.design() != Design::Ls) {
    throw Error(ErrorCode::WrongDesign, "difference decomposition applies to Latin squares only");
  }
  const Decomposition d = decompose(table);
  const std::size_t n = table.treatments();
  const double T = static_cast<double>(n);

  LsDifferenceDecomposition out;
  out.interaction_sum = d.row_interaction_sum() + d.column_interaction_sum();
  out.neg_eta_variance_sum = -d.eta_variance_sum();
  out.correlation_term = d.correlation_cross_sum() / (T - 1);

  CompensatedSum r_sum;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      if (t != u) r_sum.add(d.correlation(t, u));
    }
  }
  const double mean_sigma_sq = d.eta_variance_sum() / T;
  const double mean_r = r_sum.value() / (T * (T - 1));
  out.constant_case_difference = out.interaction_sum - T * mean_sigma_sq * (1.0 - mean_r);
  return out;
}

MeanDifferenceVariance mean_difference_variance(const PotentialOutcomeTable& table,
                                                std::size_t t, std::size_t u) {
  const std::size_t n = table.treatments();
  if (t >= n || u >= n) {
    throw Error(ErrorCode::InvalidArgument, "treatment index out of range");
  }
  if (t == u) {
    throw Error(ErrorCode::SameTreatment, "variance of a mean difference needs two treatments");
  }
  const Decomposition d = decompose(table);
  const double T = static_cast<double>(n);
  const double sigma_eps_sq = table.technical_error_sd() * table.technical_error_sd();
  const double var_pair = d.eta_variances[t] + d.eta_variances[u];
  const double cov_term =
      2.0 * d.correlation(t, u) * std::sqrt(d.eta_variances[t] * d.eta_variances[u]);

  MeanDifferenceVariance out;
  out.estimate_is_unbiased_for = d.grand_means[t] - d.grand_means[u];
  if (table.design() == Design::Rcb) {
    const double N = static_cast<double>(table.rows());
    out.variance = 2.0 * sigma_eps_sq / N + var_pair / N + cov_term / (N * (T - 1));
  } else {
    out.variance = 2.0 * sigma_eps_sq / T + var_pair / (T - 1) + cov_term / ((T - 1) * (T - 1));
  }
  return out;
}

}  // namespace randinf
