#include "randinf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <random>
#include <utility>

#include "randinf/compensated_sum.hpp"
#include "randinf/error.hpp"
#include "randinf/fdist.hpp"

namespace randinf {

namespace {

double round_significant(double x) {
  if (x == 0.0) return 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return std::strtod(buf, nullptr);
}

void require_no_technical_error(const PotentialOutcomeTable& table) {
  if (table.technical_error_sd() != 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "the randomization distribution is defined for sigma_eps = 0; "
                "use the Monte Carlo path for technical errors");
  }
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1)");
  }
}

FReference reference_for(std::size_t df1, std::size_t df0) {
  return {static_cast<int>(df1), static_cast<int>(df0)};
}

std::uint64_t expected_count(const PotentialOutcomeTable& table, const RandomizationSpace& space,
                             std::uint64_t visited) {
  if (space.kind == SpaceKind::UniformSample) return space.sample_size;
  const auto size =
      exact_space_size(table.design(), table.rows(), table.treatments(), space.measure);
  return size.value_or(visited);
}

}  // namespace

double RandomizationSummary::probability_f_exceeds(double k) const {
  CompensatedSum p;
  for (const auto& pt : support) {
    if (pt.f_stat.exceeds(k)) p.add(pt.probability);
  }
  return p.value();
}

std::size_t RandomizationSummary::distinct_f_values() const {
  std::vector<FStatistic> seen;
  for (const auto& pt : support) {
    const bool dup = std::any_of(seen.begin(), seen.end(), [&](const FStatistic& f) {
      if (f.kind() != pt.f_stat.kind()) return false;
      if (!f.is_finite()) return true;
      return round_significant(f.value()) == round_significant(pt.f_stat.value());
    });
    if (!dup) seen.push_back(pt.f_stat);
  }
  return seen.size();
}

RandomizationSummary exact_distribution(const PotentialOutcomeTable& table,
                                        const RandomizationSpace& space) {
  require_no_technical_error(table);
  RandomizationSummary out;
  out.is_exact = space.kind == SpaceKind::ExactEnumeration;
  out.df_treatment = table.treatments() - 1;
  out.df_residual = residual_df(table.design(), table.rows(), table.treatments());

  std::map<std::pair<double, double>, std::size_t> index;
  CompensatedSum s0_total;
  CompensatedSum s1_total;
  const std::uint64_t visited = for_each_assignment(
      table.design(), table.rows(), table.treatments(), space, [&](const Assignment& a) {
        const AnovaSummary s = anova(table, a);
        s0_total.add(s.s0_sq);
        s1_total.add(s.s1_sq);
        const auto key = std::make_pair(round_significant(s.s0_sq), round_significant(s.s1_sq));
        auto [it, inserted] = index.try_emplace(key, out.support.size());
        if (inserted) out.support.push_back({s.s0_sq, s.s1_sq, s.f_stat, 0.0, 0});
        ++out.support[it->second].count;
      });
  out.assignment_count = visited;
  if (visited == 0) return out;
  for (auto& pt : out.support) {
    pt.probability = static_cast<double>(pt.count) / static_cast<double>(visited);
  }
  out.mean_s0 = s0_total.value() / static_cast<double>(visited);
  out.mean_s1 = s1_total.value() / static_cast<double>(visited);
  if (out.is_exact && visited != expected_count(table, space, visited)) {
    throw Error(ErrorCode::InvalidArgument, "enumeration visited an unexpected number of assignments");
  }
  return out;
}

NullStatus null_status(const PotentialOutcomeTable& table, double tolerance) {
  return {satisfies_neyman_null(table, tolerance), satisfies_sharp_null(table, tolerance)};
}

TypeOneError type1_error(const RandomizationSummary& summary, double alpha, NullStatus status) {
  require_alpha(alpha);
  TypeOneError out;
  out.alpha = alpha;
  out.cutoff = f_quantile(reference_for(summary.df_treatment, summary.df_residual), 1.0 - alpha);
  out.rejection_probability = summary.probability_f_exceeds(out.cutoff);
  out.null_status = status;
  return out;
}

TypeOneError type1_error(const PotentialOutcomeTable& table, double alpha,
                         const RandomizationSpace& space) {
  require_alpha(alpha);
  return type1_error(exact_distribution(table, space), alpha, null_status(table));
}

SurvivalCurve survival_curve(const RandomizationSummary& summary, std::span<const double> grid) {
  const FReference ref = reference_for(summary.df_treatment, summary.df_residual);
  SurvivalCurve c;
  c.k.assign(grid.begin(), grid.end());
  c.p_randomization.reserve(grid.size());
  c.p_reference.reserve(grid.size());
  for (double k : grid) {
    c.p_randomization.push_back(summary.probability_f_exceeds(k));
    c.p_reference.push_back(f_survival(ref, k));
  }
  return c;
}

SurvivalCurve survival_curve(const PotentialOutcomeTable& table, std::span<const double> grid,
                             const RandomizationSpace& space) {
  return survival_curve(exact_distribution(table, space), grid);
}

std::vector<double> default_curve_grid(const RandomizationSummary& summary,
                                       std::size_t points) {
  double upper =
      2.0 * f_quantile(reference_for(summary.df_treatment, summary.df_residual), 0.95);
  for (const auto& pt : summary.support) {
    if (pt.f_stat.is_finite()) upper = std::max(upper, pt.f_stat.value());
  }
  std::vector<double> grid;
  if (points == 0) return grid;
  if (points == 1) return {0.0};
  grid.reserve(points);
  for (std::size_t m = 0; m < points; ++m) {
    grid.push_back(upper * static_cast<double>(m) / static_cast<double>(points - 1));
  }
  return grid;
}

SurvivalCurve survival_curve(const PotentialOutcomeTable& table, std::size_t points,
                             const RandomizationSpace& space) {
  const RandomizationSummary summary = exact_distribution(table, space);
  const auto grid = default_curve_grid(summary, points);
  return survival_curve(summary, grid);
}

MonteCarloReport monte_carlo_with_errors(const PotentialOutcomeTable& table, double sigma_eps,
                                         std::uint64_t replications, double alpha,
                                         std::uint64_t seed, const RandomizationSpace& space,
                                         bool retain_replications) {
  require_alpha(alpha);
  if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps)) {
    throw Error(ErrorCode::InvalidArgument, "sigma_eps must be positive and finite");
  }
  const std::size_t T = table.treatments();
  const std::size_t df0 = residual_df(table.design(), table.rows(), T);

  MonteCarloReport out;
  out.replications = replications;
  out.error_sd = sigma_eps;
  out.seed = seed;
  out.alpha = alpha;
  out.cutoff = f_quantile(reference_for(T - 1, df0), 1.0 - alpha);

  // Small spaces are materialized once and reused by every replication.
  constexpr std::uint64_t kMaterializeLimit = 100'000;
  std::vector<Assignment> cached;
  const auto size = space.kind == SpaceKind::UniformSample
                        ? std::optional<std::uint64_t>(space.sample_size)
                        : exact_space_size(table.design(), table.rows(), T, space.measure);
  if (size && *size <= kMaterializeLimit) {
    cached.reserve(*size);
    for_each_assignment(table.design(), table.rows(), T, space,
                        [&](const Assignment& a) { cached.push_back(a); });
  }

  const auto base = table.outcomes();
  CompensatedSum sum;
  CompensatedSum sum_sq;
  std::vector<double> perturbed(base.size());
  for (std::uint64_t r = 0; r < replications; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, sigma_eps);
    for (std::size_t k = 0; k < base.size(); ++k) perturbed[k] = base[k] + noise(rng);
    const PotentialOutcomeTable draw = table.with_technical_error_sd(0.0).with_outcomes(perturbed);

    std::uint64_t rejections = 0;
    std::uint64_t total = 0;
    auto tally = [&](const Assignment& a) {
      if (anova(draw, a).f_stat.exceeds(out.cutoff)) ++rejections;
      ++total;
    };
    if (!cached.empty()) {
      for (const auto& a : cached) tally(a);
    } else {
      for_each_assignment(table.design(), table.rows(), T, space, tally);
    }
    const double p = total == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(total);
    sum.add(p);
    sum_sq.add(p * p);
    if (retain_replications) out.per_replication.push_back(p);
  }
  if (replications > 0) {
    const double n = static_cast<double>(replications);
    out.mean_rejection = sum.value() / n;
    if (replications > 1) {
      const double var = std::max(0.0, (sum_sq.value() - n * out.mean_rejection * out.mean_rejection) / (n - 1));
      out.standard_error = std::sqrt(var / n);
    }
  }
  return out;
}

double randomization_test_size(const PotentialOutcomeTable& table, double alpha,
                               const RandomizationSpace& space) {
  require_alpha(alpha);
  require_no_technical_error(table);
  std::vector<double> stats;
  for_each_assignment(table.design(), table.rows(), table.treatments(), space,
                      [&](const Assignment& a) {
                        const FStatistic f = anova(table, a).f_stat;
                        // Degenerate F is the least extreme possible value.
                        stats.push_back(f.kind() == FStatistic::Kind::Degenerate
                                            ? -std::numeric_limits<double>::infinity()
                                            : f.value());
                      });
  if (stats.empty()) return 0.0;
  std::vector<double> sorted = stats;
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(stats.size());
  std::uint64_t rejections = 0;
  for (double f : stats) {
    // Values within 1e-9 relative are ties; counting them as ">=" keeps
    // the test conservative against rounding.
    const double lowered = std::isfinite(f) ? f - 1e-9 * std::max(1.0, std::fabs(f)) : f;
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), lowered);
    const double p_value = static_cast<double>(sorted.end() - first) / m;
    if (p_value <= alpha) ++rejections;
  }
  return static_cast<double>(rejections) / m;
}

PotentialOutcomeTable zero_rejection_witness(double scale, std::span<const double> row_effects,
                                             std::span<const double> column_effects) {
  constexpr std::size_t T = 4;
  if (!(scale > 0.0) || row_effects.size() != T || column_effects.size() != T) {
    throw Error(ErrorCode::InvalidArgument,
                "witness needs a positive scale and four row and column effects");
  }
  std::vector<double> x(T * T * T);
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      const double spike = (i == j && i < 2) ? scale : 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        x[(i * T + j) * T + t] = spike + row_effects[i] + column_effects[j];
      }
    }
  }
  return PotentialOutcomeTable::latin_square(T, std::move(x), 0.0, "zero-rejection witness");
}

}  // namespace randinf
