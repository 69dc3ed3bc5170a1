#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randinf/design.hpp"

namespace randinf {

/// Nested [row][plot][treatment] array, the shape tables arrive in from
/// documents and test fixtures.
using NestedOutcomes = std::vector<std::vector<std::vector<double>>>;

/// Unvalidated description of a potential-outcome table.
struct TableInput {
  Design design = Design::Rcb;
  std::size_t num_blocks = 0;  // ignored for Latin squares
  std::size_t num_treatments = 0;
  NestedOutcomes outcomes;
  double technical_error_sd = 0.0;
  std::string name;
};

/// Full table of potential outcomes X_ij(t) for an RCB (N x T x T) or a
/// Latin square (T x T x T). Immutable once built; the only way to obtain
/// one is through validate() or the flat factories, which enforce the
/// shape and finiteness invariants.
class PotentialOutcomeTable {
 public:
  /// Flat storage is [i][j][t] row-major, zero-based.
  static PotentialOutcomeTable rcb(std::size_t num_blocks, std::size_t num_treatments,
                                   std::vector<double> outcomes,
                                   double technical_error_sd = 0.0, std::string name = {});
  static PotentialOutcomeTable latin_square(std::size_t num_treatments,
                                            std::vector<double> outcomes,
                                            double technical_error_sd = 0.0,
                                            std::string name = {});

  Design design() const noexcept { return design_; }
  /// N for RCB, T for LS.
  std::size_t rows() const noexcept { return rows_; }
  /// Plots per block (RCB) or columns (LS); always T.
  std::size_t columns() const noexcept { return treatments_; }
  std::size_t treatments() const noexcept { return treatments_; }
  std::size_t unit_count() const noexcept { return rows_ * treatments_; }
  double technical_error_sd() const noexcept { return technical_error_sd_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(std::size_t i, std::size_t j, std::size_t t) const noexcept {
    return outcomes_[(i * treatments_ + j) * treatments_ + t];
  }
  std::span<const double> outcomes() const noexcept { return outcomes_; }

  /// Same design and shape, new outcomes (validated).
  PotentialOutcomeTable with_outcomes(std::vector<double> outcomes) const;
  PotentialOutcomeTable with_technical_error_sd(double sd) const;

  NestedOutcomes nested() const;

  friend bool operator==(const PotentialOutcomeTable&, const PotentialOutcomeTable&) = default;

 private:
  PotentialOutcomeTable(Design design, std::size_t rows, std::size_t treatments,
                        std::vector<double> outcomes, double sd, std::string name);

  Design design_;
  std::size_t rows_;
  std::size_t treatments_;
  std::vector<double> outcomes_;
  double technical_error_sd_;
  std::string name_;
};

/// Checks shape against the design, finiteness and sigma_eps >= 0.
/// Throws Error{DimensionMismatch | NonFiniteEntry | NegativeErrorSd}.
PotentialOutcomeTable validate(const TableInput& input);

/// Exact finite-population decomposition
///   RCB: X_ij(t) = Xbar..(t) + B_i(t) + eta_ij(t)
///   LS:  X_ij(t) = Xbar..(t) + R_i(t) + C_j(t) + eta_ij(t)
struct Decomposition {
  Design design = Design::Rcb;
  std::size_t rows = 0;
  std::size_t treatments = 0;

  std::vector<double> grand_means;  // Xbar..(t)
  double overall_mean = 0.0;        // Xbar..(.)
  /// B_i(t) for RCB, R_i(t) for LS; [i * T + t].
  std::vector<double> row_corrections;
  /// C_j(t), LS only; [j * T + t].
  std::vector<double> column_corrections;
  /// eta_ij(t); same layout as the outcomes.
  std::vector<double> residuals;
  /// sigma_eta^2(t): divisor NT (RCB) or T^2 (LS).
  std::vector<double> eta_variances;
  /// r(t,t') as a T x T matrix with unit diagonal.
  std::vector<double> eta_correlations;
  /// Set when some sigma_eta^2(t) is zero; the affected r(t,t') are 0.
  bool has_undefined_correlation = false;

  double row_correction(std::size_t i, std::size_t t) const {
    return row_corrections[i * treatments + t];
  }
  double column_correction(std::size_t j, std::size_t t) const {
    return column_corrections[j * treatments + t];
  }
  double residual(std::size_t i, std::size_t j, std::size_t t) const {
    return residuals[(i * treatments + j) * treatments + t];
  }
  double correlation(std::size_t t, std::size_t u) const {
    return eta_correlations[t * treatments + u];
  }

  /// Sum over t != t' of r(t,t') sqrt(sigma^2(t) sigma^2(t')).
  double correlation_cross_sum() const;
  double eta_variance_sum() const;
  /// Sum_i Sum_t {B_i(t) - Bbar_i(.)}^2 (R_i for LS).
  double row_interaction_sum() const;
  /// Sum_j Sum_t {C_j(t) - Cbar_j(.)}^2; 0 for RCB.
  double column_interaction_sum() const;

  /// Rebuilds the table the decomposition came from.
  PotentialOutcomeTable reconstruct(double technical_error_sd = 0.0) const;
};

Decomposition decompose(const PotentialOutcomeTable& table);

struct AdditivityReport {
  bool is_additive = false;
  /// tau(t) - tau(1); present only when additive.
  std::optional<std::vector<double>> treatment_shifts;
  double max_deviation = 0.0;
  /// max |eta_ij(t) - etabar_ij(.)|
  double strict_unit_treatment = 0.0;
  /// block (or row + column) by treatment interaction sum of squares
  double block_treatment = 0.0;
};

inline constexpr double kDefaultAdditivityTolerance = 1e-9;

AdditivityReport check_additivity(const PotentialOutcomeTable& table,
                                  double tolerance = kDefaultAdditivityTolerance);

/// Xbar..(1) = ... = Xbar..(T) within tolerance.
bool satisfies_neyman_null(const PotentialOutcomeTable& table,
                           double tolerance = kDefaultAdditivityTolerance);
/// X_ij(t) = X_ij(t') for every unit within tolerance.
bool satisfies_sharp_null(const PotentialOutcomeTable& table,
                          double tolerance = kDefaultAdditivityTolerance);

}  // namespace randinf
