#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randinf/potential_outcomes.hpp"
#include "randinf/randomization.hpp"

namespace randinf {

/// F = S1^2 / S0^2 with the degenerate cases made explicit.
/// S0^2 = 0 < S1^2 gives +infinity (rejects at any finite cutoff);
/// S0^2 = S1^2 = 0 is Degenerate and never rejects.
class FStatistic {
 public:
  enum class Kind { Finite, Infinite, Degenerate };

  static FStatistic finite(double v) { return {Kind::Finite, v}; }
  static FStatistic infinite() { return {Kind::Infinite, 0.0}; }
  static FStatistic degenerate() { return {Kind::Degenerate, 0.0}; }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  /// Finite value, +inf, or NaN for Degenerate.
  double value() const noexcept;
  /// Strict F > cutoff.
  bool exceeds(double cutoff) const noexcept;
  std::string to_string() const;

  friend bool operator==(const FStatistic&, const FStatistic&) = default;

 private:
  FStatistic(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

struct ObservedExperiment {
  Design design = Design::Rcb;
  std::size_t rows = 0;
  std::size_t treatments = 0;
  /// RCB: y_i(t) at [i * T + t]. LS: y_ij at [i * T + j].
  std::vector<double> observed;
  Assignment assignment;
  /// epsilon added to each unit's revealed outcome, [i * T + j]; empty
  /// when no errors were supplied.
  std::vector<double> error_draws;
};

/// Reveals one potential outcome per unit. `errors`, when non-empty, is a
/// full [i][j][t] array of technical errors; only the assigned entry of
/// each unit is used. Throws Error{ShapeMismatch}.
ObservedExperiment observe(const PotentialOutcomeTable& table, const Assignment& assignment,
                           std::span<const double> errors = {});

struct AnovaSummary {
  double s0_sq = 0.0;
  double s1_sq = 0.0;
  FStatistic f_stat = FStatistic::degenerate();
  std::size_t df_treatment = 0;
  std::size_t df_residual = 0;
  /// df1 S1^2 / (df1 S1^2 + df0 S0^2); absent when pooled is 0.
  std::optional<double> welch_stat;
  double pooled = 0.0;
};

/// Residual mean squares below this fraction of mean(y^2) count as zero
/// when classifying F.
inline constexpr double kZeroMeanSquareRelTol = 1e-24;

AnovaSummary anova(const ObservedExperiment& experiment);

/// observe + anova without retaining the experiment.
AnovaSummary anova(const PotentialOutcomeTable& table, const Assignment& assignment);

std::size_t residual_df(Design design, std::size_t rows, std::size_t treatments);

}  // namespace randinf
