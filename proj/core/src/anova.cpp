#include "randinf/anova.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "randinf/compensated_sum.hpp"
#include "randinf/error.hpp"

namespace randinf {

double FStatistic::value() const noexcept {
  switch (kind_) {
    case Kind::Finite: return value_;
    case Kind::Infinite: return std::numeric_limits<double>::infinity();
    case Kind::Degenerate: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool FStatistic::exceeds(double cutoff) const noexcept {
  switch (kind_) {
    case Kind::Finite: return value_ > cutoff;
    case Kind::Infinite: return true;
    case Kind::Degenerate: break;
  }
  return false;
}

std::string FStatistic::to_string() const {
  if (kind_ == Kind::Infinite) return "inf";
  if (kind_ == Kind::Degenerate) return "degenerate";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

std::size_t residual_df(Design design, std::size_t rows, std::size_t treatments) {
  return design == Design::Rcb ? (rows - 1) * (treatments - 1)
                               : (treatments - 1) * (treatments - 2);
}

ObservedExperiment observe(const PotentialOutcomeTable& table, const Assignment& assignment,
                           std::span<const double> errors) {
  const std::size_t rows = table.rows();
  const std::size_t T = table.treatments();
  if (assignment.design() != table.design() || assignment.rows() != rows ||
      assignment.treatments() != T) {
    throw Error(ErrorCode::ShapeMismatch, "assignment does not match the table's design");
  }
  if (!errors.empty() && errors.size() != table.outcomes().size()) {
    throw Error(ErrorCode::ShapeMismatch, "technical-error array does not match the table");
  }

  std::vector<double> observed(rows * T);
  std::vector<double> draws;
  if (!errors.empty()) draws.resize(rows * T);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      const std::size_t t = assignment.treatment_at(i, j);
      double x = table(i, j, t);
      if (!errors.empty()) {
        const double eps = errors[(i * T + j) * T + t];
        draws[i * T + j] = eps;
        x += eps;
      }
      // RCB records by (block, treatment); LS by cell.
      observed[table.design() == Design::Rcb ? i * T + t : i * T + j] = x;
    }
  }
  return ObservedExperiment{table.design(), rows, T, std::move(observed), assignment,
                            std::move(draws)};
}

namespace {

double mean(const CompensatedSum& s, std::size_t n) { return s.value() / static_cast<double>(n); }

FStatistic classify(double& s0, double& s1, double mean_square_y) {
  const double floor = kZeroMeanSquareRelTol * mean_square_y;
  if (s0 <= floor) s0 = 0.0;
  if (s1 <= floor) s1 = 0.0;
  if (s0 == 0.0) return s1 == 0.0 ? FStatistic::degenerate() : FStatistic::infinite();
  return FStatistic::finite(s1 / s0);
}

}  // namespace

AnovaSummary anova(const ObservedExperiment& e) {
  const std::size_t rows = e.rows;
  const std::size_t T = e.treatments;
  const auto& y = e.observed;

  CompensatedSum total;
  CompensatedSum total_sq;
  for (double v : y) {
    total.add(v);
    total_sq.add(v * v);
  }
  const double grand = mean(total, y.size());

  AnovaSummary out;
  out.df_treatment = T - 1;
  out.df_residual = residual_df(e.design, rows, T);

  if (e.design == Design::Rcb) {
    std::vector<double> treatment_means(T);
    std::vector<double> block_means(rows);
    for (std::size_t t = 0; t < T; ++t) {
      CompensatedSum s;
      for (std::size_t i = 0; i < rows; ++i) s.add(y[i * T + t]);
      treatment_means[t] = mean(s, rows);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      CompensatedSum s;
      for (std::size_t t = 0; t < T; ++t) s.add(y[i * T + t]);
      block_means[i] = mean(s, T);
    }
    CompensatedSum resid;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t t = 0; t < T; ++t) {
        const double r = y[i * T + t] - treatment_means[t] - block_means[i] + grand;
        resid.add(r * r);
      }
    }
    CompensatedSum treat;
    for (double m : treatment_means) treat.add((m - grand) * (m - grand));
    out.s0_sq = resid.value() / static_cast<double>(out.df_residual);
    out.s1_sq = static_cast<double>(rows) / static_cast<double>(T - 1) * treat.value();
  } else {
    std::vector<double> row_means(T), col_means(T), treatment_means(T);
    std::vector<CompensatedSum> by_treatment(T);
    for (std::size_t i = 0; i < T; ++i) {
      CompensatedSum rs;
      CompensatedSum cs;
      for (std::size_t j = 0; j < T; ++j) {
        rs.add(y[i * T + j]);
        cs.add(y[j * T + i]);
        by_treatment[e.assignment.treatment_at(i, j)].add(y[i * T + j]);
      }
      row_means[i] = mean(rs, T);
      col_means[i] = mean(cs, T);
    }
    for (std::size_t t = 0; t < T; ++t) treatment_means[t] = mean(by_treatment[t], T);
    CompensatedSum resid;
    for (std::size_t i = 0; i < T; ++i) {
      for (std::size_t j = 0; j < T; ++j) {
        const double r = y[i * T + j] - row_means[i] - col_means[j] -
                         treatment_means[e.assignment.treatment_at(i, j)] + 2.0 * grand;
        resid.add(r * r);
      }
    }
    CompensatedSum treat;
    for (double m : treatment_means) treat.add((m - grand) * (m - grand));
    out.s0_sq = resid.value() / static_cast<double>(out.df_residual);
    out.s1_sq = static_cast<double>(T) / static_cast<double>(T - 1) * treat.value();
  }

  out.f_stat = classify(out.s0_sq, out.s1_sq, mean(total_sq, y.size()));
  const double df1 = static_cast<double>(out.df_treatment);
  const double df0 = static_cast<double>(out.df_residual);
  out.pooled = df1 * out.s1_sq + df0 * out.s0_sq;
  if (out.pooled > 0.0) out.welch_stat = df1 * out.s1_sq / out.pooled;
  return out;
}

AnovaSummary anova(const PotentialOutcomeTable& table, const Assignment& assignment) {
  return anova(observe(table, assignment));
}

}  // namespace randinf
