#include "randinf/potential_outcomes.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "randinf/compensated_sum.hpp"
#include "randinf/error.hpp"

namespace randinf {

namespace {

void check_shape(Design design, std::size_t rows, std::size_t treatments) {
  if (treatments < 2) {
    throw Error(ErrorCode::DimensionMismatch, "at least 2 treatments are required");
  }
  if (design == Design::Rcb && rows < 2) {
    throw Error(ErrorCode::DimensionMismatch,
                "a randomized block design needs at least 2 blocks for a residual mean square");
  }
  if (design == Design::Ls) {
    if (rows != treatments) {
      throw Error(ErrorCode::DimensionMismatch, "a Latin square table must be T x T x T");
    }
    if (treatments < 3) {
      throw Error(ErrorCode::DimensionMismatch,
                  "a Latin square needs order >= 3 for a residual mean square");
    }
  }
}

void check_values(std::span<const double> outcomes, double sd) {
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (!std::isfinite(outcomes[k])) {
      throw Error(ErrorCode::NonFiniteEntry,
                  "non-finite potential outcome at flat index " + std::to_string(k));
    }
  }
  if (!std::isfinite(sd)) {
    throw Error(ErrorCode::NonFiniteEntry, "technical_error_sd is not finite");
  }
  if (sd < 0.0) {
    throw Error(ErrorCode::NegativeErrorSd, "technical_error_sd must be nonnegative");
  }
}

double mean_of(CompensatedSum s, std::size_t n) { return s.value() / static_cast<double>(n); }

}  // namespace

PotentialOutcomeTable::PotentialOutcomeTable(Design design, std::size_t rows,
                                             std::size_t treatments,
                                             std::vector<double> outcomes, double sd,
                                             std::string name)
    : design_(design),
      rows_(rows),
      treatments_(treatments),
      outcomes_(std::move(outcomes)),
      technical_error_sd_(sd),
      name_(std::move(name)) {
  check_shape(design_, rows_, treatments_);
  if (outcomes_.size() != rows_ * treatments_ * treatments_) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(rows_ * treatments_ * treatments_) +
                    " potential outcomes, got " + std::to_string(outcomes_.size()));
  }
  check_values(outcomes_, technical_error_sd_);
}

PotentialOutcomeTable PotentialOutcomeTable::rcb(std::size_t num_blocks,
                                                 std::size_t num_treatments,
                                                 std::vector<double> outcomes,
                                                 double technical_error_sd, std::string name) {
  return {Design::Rcb, num_blocks, num_treatments, std::move(outcomes), technical_error_sd,
          std::move(name)};
}

PotentialOutcomeTable PotentialOutcomeTable::latin_square(std::size_t num_treatments,
                                                          std::vector<double> outcomes,
                                                          double technical_error_sd,
                                                          std::string name) {
  return {Design::Ls, num_treatments, num_treatments, std::move(outcomes), technical_error_sd,
          std::move(name)};
}

PotentialOutcomeTable PotentialOutcomeTable::with_outcomes(std::vector<double> outcomes) const {
  return {design_, rows_, treatments_, std::move(outcomes), technical_error_sd_, name_};
}

PotentialOutcomeTable PotentialOutcomeTable::with_technical_error_sd(double sd) const {
  return {design_, rows_, treatments_, outcomes_, sd, name_};
}

NestedOutcomes PotentialOutcomeTable::nested() const {
  NestedOutcomes out(rows_, std::vector<std::vector<double>>(treatments_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < treatments_; ++j) {
      auto first = outcomes_.begin() + static_cast<std::ptrdiff_t>((i * treatments_ + j) * treatments_);
      out[i][j].assign(first, first + static_cast<std::ptrdiff_t>(treatments_));
    }
  }
  return out;
}

PotentialOutcomeTable validate(const TableInput& input) {
  const std::size_t t_count = input.num_treatments;
  const std::size_t rows = input.design == Design::Rcb ? input.num_blocks : t_count;
  check_shape(input.design, rows, t_count);
  if (input.outcomes.size() != rows) {
    throw Error(ErrorCode::DimensionMismatch,
                "outcomes has " + std::to_string(input.outcomes.size()) + " rows, expected " +
                    std::to_string(rows));
  }
  std::vector<double> flat;
  flat.reserve(rows * t_count * t_count);
  for (std::size_t i = 0; i < rows; ++i) {
    if (input.outcomes[i].size() != t_count) {
      throw Error(ErrorCode::DimensionMismatch,
                  "row " + std::to_string(i + 1) + " has " +
                      std::to_string(input.outcomes[i].size()) + " units, expected " +
                      std::to_string(t_count));
    }
    for (std::size_t j = 0; j < t_count; ++j) {
      const auto& unit = input.outcomes[i][j];
      if (unit.size() != t_count) {
        throw Error(ErrorCode::DimensionMismatch,
                    "unit (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") has " +
                        std::to_string(unit.size()) + " potential outcomes, expected " +
                        std::to_string(t_count));
      }
      flat.insert(flat.end(), unit.begin(), unit.end());
    }
  }
  if (input.design == Design::Rcb) {
    return PotentialOutcomeTable::rcb(rows, t_count, std::move(flat), input.technical_error_sd,
                                      input.name);
  }
  return PotentialOutcomeTable::latin_square(t_count, std::move(flat), input.technical_error_sd,
                                             input.name);
}

Decomposition decompose(const PotentialOutcomeTable& table) {
  const std::size_t rows = table.rows();
  const std::size_t T = table.treatments();
  Decomposition d;
  d.design = table.design();
  d.rows = rows;
  d.treatments = T;
  d.grand_means.assign(T, 0.0);
  d.row_corrections.assign(rows * T, 0.0);
  d.residuals.assign(rows * T * T, 0.0);
  d.eta_variances.assign(T, 0.0);
  d.eta_correlations.assign(T * T, 0.0);

  // Row (block) means Xbar_i.(t) and column means Xbar_.j(t).
  std::vector<double> row_means(rows * T);
  std::vector<double> col_means(T * T);
  for (std::size_t t = 0; t < T; ++t) {
    CompensatedSum all;
    for (std::size_t i = 0; i < rows; ++i) {
      CompensatedSum s;
      for (std::size_t j = 0; j < T; ++j) {
        s.add(table(i, j, t));
        all.add(table(i, j, t));
      }
      row_means[i * T + t] = mean_of(s, T);
    }
    for (std::size_t j = 0; j < T; ++j) {
      CompensatedSum s;
      for (std::size_t i = 0; i < rows; ++i) s.add(table(i, j, t));
      col_means[j * T + t] = mean_of(s, rows);
    }
    d.grand_means[t] = mean_of(all, rows * T);
  }
  d.overall_mean = mean_of([&] {
    CompensatedSum s;
    for (double g : d.grand_means) s.add(g);
    return s;
  }(), T);

  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      d.row_corrections[i * T + t] = row_means[i * T + t] - d.grand_means[t];
    }
  }
  if (d.design == Design::Ls) {
    d.column_corrections.assign(T * T, 0.0);
    for (std::size_t j = 0; j < T; ++j) {
      for (std::size_t t = 0; t < T; ++t) {
        d.column_corrections[j * T + t] = col_means[j * T + t] - d.grand_means[t];
      }
    }
  }

  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      for (std::size_t t = 0; t < T; ++t) {
        double eta = table(i, j, t) - row_means[i * T + t];
        if (d.design == Design::Ls) eta = eta - col_means[j * T + t] + d.grand_means[t];
        d.residuals[(i * T + j) * T + t] = eta;
      }
    }
  }

  const double divisor = static_cast<double>(rows * T);
  std::vector<double> cov(T * T);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = t; u < T; ++u) {
      CompensatedSum s;
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < T; ++j) s.add(d.residual(i, j, t) * d.residual(i, j, u));
      }
      cov[t * T + u] = cov[u * T + t] = s.value() / divisor;
    }
  }
  for (std::size_t t = 0; t < T; ++t) d.eta_variances[t] = cov[t * T + t];
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u < T; ++u) {
      if (t == u) {
        d.eta_correlations[t * T + u] = 1.0;
        continue;
      }
      const double scale = std::sqrt(d.eta_variances[t] * d.eta_variances[u]);
      if (scale == 0.0) {
        d.has_undefined_correlation = true;
        d.eta_correlations[t * T + u] = 0.0;
      } else {
        d.eta_correlations[t * T + u] = std::clamp(cov[t * T + u] / scale, -1.0, 1.0);
      }
    }
  }
  return d;
}

double Decomposition::correlation_cross_sum() const {
  CompensatedSum s;
  for (std::size_t t = 0; t < treatments; ++t) {
    for (std::size_t u = 0; u < treatments; ++u) {
      if (t == u) continue;
      s.add(correlation(t, u) * std::sqrt(eta_variances[t] * eta_variances[u]));
    }
  }
  return s.value();
}

double Decomposition::eta_variance_sum() const { return compensated_sum(eta_variances); }

namespace {

double interaction_sum(const std::vector<double>& corrections, std::size_t levels,
                       std::size_t T) {
  CompensatedSum total;
  for (std::size_t i = 0; i < levels; ++i) {
    CompensatedSum m;
    for (std::size_t t = 0; t < T; ++t) m.add(corrections[i * T + t]);
    const double mean = m.value() / static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double dev = corrections[i * T + t] - mean;
      total.add(dev * dev);
    }
  }
  return total.value();
}

}  // namespace

double Decomposition::row_interaction_sum() const {
  return interaction_sum(row_corrections, rows, treatments);
}

double Decomposition::column_interaction_sum() const {
  if (design != Design::Ls) return 0.0;
  return interaction_sum(column_corrections, treatments, treatments);
}

PotentialOutcomeTable Decomposition::reconstruct(double technical_error_sd) const {
  const std::size_t T = treatments;
  std::vector<double> x(rows * T * T);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      for (std::size_t t = 0; t < T; ++t) {
        double v = grand_means[t] + row_correction(i, t) + residual(i, j, t);
        if (design == Design::Ls) v += column_correction(j, t);
        x[(i * T + j) * T + t] = v;
      }
    }
  }
  if (design == Design::Rcb) {
    return PotentialOutcomeTable::rcb(rows, T, std::move(x), technical_error_sd);
  }
  return PotentialOutcomeTable::latin_square(T, std::move(x), technical_error_sd);
}

AdditivityReport check_additivity(const PotentialOutcomeTable& table, double tolerance) {
  if (!(tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "additivity tolerance must be nonnegative");
  }
  const std::size_t rows = table.rows();
  const std::size_t T = table.treatments();
  AdditivityReport r;

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = t + 1; u < T; ++u) {
      double lo = 0.0;
      double hi = 0.0;
      bool first = true;
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < T; ++j) {
          const double diff = table(i, j, t) - table(i, j, u);
          if (first) {
            lo = hi = diff;
            first = false;
          } else {
            lo = std::min(lo, diff);
            hi = std::max(hi, diff);
          }
        }
      }
      r.max_deviation = std::max(r.max_deviation, hi - lo);
    }
  }
  r.is_additive = r.max_deviation <= tolerance;

  if (r.is_additive) {
    std::vector<double> shifts(T, 0.0);
    for (std::size_t t = 1; t < T; ++t) {
      CompensatedSum s;
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < T; ++j) s.add(table(i, j, t) - table(i, j, 0));
      }
      shifts[t] = s.value() / static_cast<double>(rows * T);
    }
    r.treatment_shifts = std::move(shifts);
  }

  const Decomposition d = decompose(table);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      CompensatedSum s;
      for (std::size_t t = 0; t < T; ++t) s.add(d.residual(i, j, t));
      const double mean = s.value() / static_cast<double>(T);
      for (std::size_t t = 0; t < T; ++t) {
        r.strict_unit_treatment =
            std::max(r.strict_unit_treatment, std::fabs(d.residual(i, j, t) - mean));
      }
    }
  }
  r.block_treatment = d.row_interaction_sum() + d.column_interaction_sum();
  return r;
}

bool satisfies_neyman_null(const PotentialOutcomeTable& table, double tolerance) {
  const Decomposition d = decompose(table);
  const auto [lo, hi] = std::minmax_element(d.grand_means.begin(), d.grand_means.end());
  return *hi - *lo <= tolerance;
}

bool satisfies_sharp_null(const PotentialOutcomeTable& table, double tolerance) {
  const std::size_t T = table.treatments();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      for (std::size_t t = 1; t < T; ++t) {
        if (std::fabs(table(i, j, t) - table(i, j, 0)) > tolerance) return false;
      }
    }
  }
  return true;
}

}  // namespace randinf
