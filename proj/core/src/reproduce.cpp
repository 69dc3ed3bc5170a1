#include "randinf/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "randinf/expected_mean_squares.hpp"
#include "randinf/fdist.hpp"
#include "randinf/inference.hpp"
#include "randinf/io.hpp"

namespace randinf {

namespace {

class CheckList {
 public:
  void within(std::string id, std::string description, double observed, double expected,
              double tolerance) {
    checks_.push_back({std::move(id), std::move(description), observed, expected, tolerance,
                       ReproductionCheck::Relation::Within,
                       std::fabs(observed - expected) <= tolerance});
  }

  void less_than(std::string id, std::string description, double observed, double bound) {
    checks_.push_back({std::move(id), std::move(description), observed, bound, 0.0,
                       ReproductionCheck::Relation::LessThan, observed < bound});
  }

  std::vector<ReproductionCheck> take() { return std::move(checks_); }

 private:
  std::vector<ReproductionCheck> checks_;
};

}  // namespace

bool ReproductionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ReproductionReport reproduce(const std::filesystem::path& data_dir) {
  CheckList list;

  const auto t1 = load_table(data_dir / "table1.json");
  const auto e1 = expected_ms(t1);
  list.within("table1.e_s0", "RCB E(S0^2)", e1.e_s0, 215.875, 1e-9);
  list.within("table1.e_s1", "RCB E(S1^2)", e1.e_s1, 213.625, 1e-9);
  list.within("table1.difference", "RCB E(S0^2) - E(S1^2)", e1.difference, 2.25, 1e-9);
  list.within("table1.interaction_term", "RCB block-treatment interaction term",
              e1.interaction_term, 2.25, 1e-9);

  const auto t2 = load_table(data_dir / "table2.json");
  const auto e2 = expected_ms(t2);
  const auto d2 = ls_difference_decomposition(t2);
  list.within("table2.e_s0", "LS E(S0^2)", e2.e_s0, 252.07, 0.005);
  list.within("table2.e_s1", "LS E(S1^2)", e2.e_s1, 172.38, 0.005);
  list.within("table2.difference", "LS E(S0^2) - E(S1^2)", e2.difference, 79.69, 0.01);
  list.within("table2.interaction_sum", "row/column interaction sum", d2.interaction_sum,
              569.93, 0.005);
  list.within("table2.neg_eta_variance_sum", "-sum sigma_eta^2(t)", d2.neg_eta_variance_sum,
              -313.56, 0.005);
  list.within("table2.correlation_term", "correlation term", d2.correlation_term, 62.41, 0.005);

  const auto t3 = load_table(data_dir / "table3.json");
  const auto e3 = expected_ms(t3);
  const auto d3 = ls_difference_decomposition(t3);
  list.within("table3.e_s0", "LS E(S0^2)", e3.e_s0, 4.96, 0.005);
  list.within("table3.e_s1", "LS E(S1^2)", e3.e_s1, 6.77, 0.005);
  list.within("table3.interaction_sum", "row/column interaction sum", d3.interaction_sum, 9.48,
              0.005);
  list.within("table3.neg_eta_variance_sum", "-sum sigma_eta^2(t)", d3.neg_eta_variance_sum,
              -14.59, 0.005);
  list.within("table3.correlation_term", "correlation term", d3.correlation_term, -2.11, 0.005);
  list.less_than("table3.difference_sign", "E(S0^2) - E(S1^2) is negative", e3.difference, 0.0);

  const auto t4 = load_table(data_dir / "table4.json");
  const auto dist4 = exact_distribution(t4);
  const auto type1 = type1_error(dist4, 0.05, null_status(t4));
  const double cutoff_grid[] = {4.76};
  const auto curve = survival_curve(dist4, cutoff_grid);
  list.within("table4.assignments", "Latin squares of order 4 enumerated",
              static_cast<double>(dist4.assignment_count), 576.0, 0.0);
  list.within("table4.distinct_f", "distinct values of S1^2/S0^2",
              static_cast<double>(dist4.distinct_f_values()), 2.0, 0.0);
  list.within("table4.type1_error", "F-test rejection probability at alpha = 0.05",
              type1.rejection_probability, 0.0, 0.0);
  list.within("table4.cutoff", "F(3,6) 0.95 cutoff", type1.cutoff, 4.76, 0.005);
  list.within("table4.p_randomization_4.76", "P(S1^2/S0^2 > 4.76)", curve.p_randomization[0],
              0.0, 0.0);
  list.within("table4.p_reference_4.76", "P(F(3,6) > 4.76)", curve.p_reference[0], 0.05, 5e-4);

  list.within("fdist.quantile_3_6_0.95", "F(3,6) 0.95 quantile", f_quantile({3, 6}, 0.95), 4.76,
              0.005);

  return {list.take()};
}

nlohmann::json to_json(const ReproductionReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"id", c.id},
                      {"description", c.description},
                      {"observed", c.observed},
                      {"expected", c.expected},
                      {"tolerance", c.tolerance},
                      {"relation", c.relation == ReproductionCheck::Relation::Within
                                       ? "within"
                                       : "less_than"},
                      {"passed", c.passed}});
  }
  return {{"checks", checks}, {"all_passed", report.all_passed()}};
}

void print_report(std::ostream& os, const ReproductionReport& report) {
  std::size_t width = 0;
  for (const auto& c : report.checks) width = std::max(width, c.id.size());
  for (const auto& c : report.checks) {
    os << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2)
       << c.id << std::setprecision(10) << "observed " << c.observed;
    if (c.relation == ReproductionCheck::Relation::Within) {
      os << "  expected " << c.expected << " +/- " << c.tolerance;
    } else {
      os << "  expected < " << c.expected;
    }
    os << "  (" << c.description << ")\n";
  }
  const auto passed = std::count_if(report.checks.begin(), report.checks.end(),
                                    [](const auto& c) { return c.passed; });
  os << passed << "/" << report.checks.size() << " checks passed\n";
}

}  // namespace randinf
