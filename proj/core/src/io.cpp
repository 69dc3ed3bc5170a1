#include "randinf/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "randinf/error.hpp"

namespace randinf {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ValidationError, field + ": " + what);
}

std::size_t positive_count(const json& doc, const char* key) {
  if (!doc.contains(key)) invalid(key, "missing required field");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    invalid(key, "must be a positive integer");
  }
  return v.get<std::size_t>();
}

std::string index_path(std::size_t i, std::optional<std::size_t> j = std::nullopt,
                       std::optional<std::size_t> t = std::nullopt) {
  // One-based to match the documents' row/plot/treatment numbering.
  std::string s = "outcomes[" + std::to_string(i + 1) + "]";
  if (j) s += "[" + std::to_string(*j + 1) + "]";
  if (t) s += "[" + std::to_string(*t + 1) + "]";
  return s;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vector_json(const std::vector<double>& v) { return json(v); }

json matrix_json(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t i = 0; i < rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < cols; ++j) row.push_back(flat[i * cols + j]);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

PotentialOutcomeTable table_from_json(const json& doc) {
  if (!doc.is_object()) invalid("document", "must be a JSON object");

  TableInput in;
  if (!doc.contains("design") || !doc.at("design").is_string()) {
    invalid("design", "missing or not a string");
  }
  const auto design = parse_design(doc.at("design").get<std::string>());
  if (!design) invalid("design", "must be \"rcb\" or \"ls\"");
  in.design = *design;
  in.num_treatments = positive_count(doc, "treatments");
  if (in.design == Design::Rcb) {
    in.num_blocks = positive_count(doc, "blocks");
  } else if (doc.contains("blocks")) {
    invalid("blocks", "not allowed for a Latin square (rows equal treatments)");
  }
  const std::size_t rows = in.design == Design::Rcb ? in.num_blocks : in.num_treatments;
  const std::size_t T = in.num_treatments;

  if (doc.contains("technical_error_sd")) {
    const json& sd = doc.at("technical_error_sd");
    if (!sd.is_number()) invalid("technical_error_sd", "must be a number");
    in.technical_error_sd = sd.get<double>();
    if (in.technical_error_sd < 0.0) invalid("technical_error_sd", "must be nonnegative");
  }
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) invalid("name", "must be a string");
    in.name = doc.at("name").get<std::string>();
  }

  if (!doc.contains("outcomes")) invalid("outcomes", "missing required field");
  const json& outcomes = doc.at("outcomes");
  if (!outcomes.is_array() || outcomes.size() != rows) {
    invalid("outcomes", "must be an array of " + std::to_string(rows) + " rows");
  }
  in.outcomes.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = outcomes[i];
    if (!row.is_array() || row.size() != T) {
      invalid(index_path(i), "must be an array of " + std::to_string(T) + " units");
    }
    in.outcomes[i].resize(T);
    for (std::size_t j = 0; j < T; ++j) {
      const json& unit = row[j];
      if (!unit.is_array() || unit.size() != T) {
        invalid(index_path(i, j), "must be an array of " + std::to_string(T) +
                                      " potential outcomes");
      }
      in.outcomes[i][j].resize(T);
      for (std::size_t t = 0; t < T; ++t) {
        if (!unit[t].is_number()) invalid(index_path(i, j, t), "must be a number");
        in.outcomes[i][j][t] = unit[t].get<double>();
      }
    }
  }

  try {
    return validate(in);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, std::string(to_string(e.code())) + ": " + e.what());
  }
}

json table_to_json(const PotentialOutcomeTable& table) {
  json doc;
  if (!table.name().empty()) doc["name"] = table.name();
  doc["design"] = std::string(to_string(table.design()));
  doc["treatments"] = table.treatments();
  if (table.design() == Design::Rcb) doc["blocks"] = table.rows();
  doc["outcomes"] = table.nested();
  doc["technical_error_sd"] = table.technical_error_sd();
  return doc;
}

PotentialOutcomeTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  try {
    return table_from_json(doc);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

json to_json(const FStatistic& f) {
  if (f.is_finite()) return f.value();
  return f.to_string();
}

json to_json(const Decomposition& d) {
  const std::size_t T = d.treatments;
  json out;
  out["design"] = std::string(to_string(d.design));
  out["grand_means"] = vector_json(d.grand_means);
  out["overall_mean"] = d.overall_mean;
  if (d.design == Design::Rcb) {
    out["block_corrections"] = matrix_json(d.row_corrections, d.rows, T);
  } else {
    out["row_corrections"] = matrix_json(d.row_corrections, d.rows, T);
    out["column_corrections"] = matrix_json(d.column_corrections, T, T);
  }
  json residuals = json::array();
  for (std::size_t i = 0; i < d.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < T; ++j) {
      json unit = json::array();
      for (std::size_t t = 0; t < T; ++t) unit.push_back(d.residual(i, j, t));
      row.push_back(std::move(unit));
    }
    residuals.push_back(std::move(row));
  }
  out["residuals"] = std::move(residuals);
  out["eta_variances"] = vector_json(d.eta_variances);
  out["eta_correlations"] = matrix_json(d.eta_correlations, T, T);
  out["has_undefined_correlation"] = d.has_undefined_correlation;
  return out;
}

json to_json(const AdditivityReport& r) {
  json out;
  out["is_additive"] = r.is_additive;
  out["treatment_shifts"] = r.treatment_shifts ? json(*r.treatment_shifts) : json(nullptr);
  out["max_deviation"] = r.max_deviation;
  out["strict_unit_treatment"] = r.strict_unit_treatment;
  out["block_treatment"] = r.block_treatment;
  return out;
}

json to_json(const Assignment& a) {
  json out = json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.treatments(); ++j) row.push_back(a.treatment_at(i, j) + 1);
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const AnovaSummary& s) {
  json out;
  out["s0_sq"] = s.s0_sq;
  out["s1_sq"] = s.s1_sq;
  out["f_stat"] = to_json(s.f_stat);
  out["df_treatment"] = s.df_treatment;
  out["df_residual"] = s.df_residual;
  out["welch_stat"] = s.welch_stat ? json(*s.welch_stat) : json(nullptr);
  out["pooled"] = s.pooled;
  return out;
}

json to_json(const ExpectedMeanSquares& e) {
  json out;
  out["e_s0"] = e.e_s0;
  out["e_s1"] = e.e_s1;
  out["e_s0_neyman"] = e.e_s0_neyman;
  out["interaction_term"] = e.interaction_term;
  out["treatment_effect_term"] = e.treatment_effect_term;
  out["difference"] = e.difference;
  out["ls_lower_bound"] = e.ls_lower_bound ? json(*e.ls_lower_bound) : json(nullptr);
  return out;
}

json to_json(const LsDifferenceDecomposition& d) {
  return {{"interaction_sum", d.interaction_sum},
          {"neg_eta_variance_sum", d.neg_eta_variance_sum},
          {"correlation_term", d.correlation_term},
          {"constant_case_difference", d.constant_case_difference}};
}

json to_json(const MeanDifferenceVariance& v) {
  return {{"estimate_is_unbiased_for", v.estimate_is_unbiased_for}, {"variance", v.variance}};
}

json to_json(const RandomizationSummary& s) {
  json support = json::array();
  for (const auto& pt : s.support) {
    support.push_back({{"s0_sq", pt.s0_sq},
                       {"s1_sq", pt.s1_sq},
                       {"f_stat", to_json(pt.f_stat)},
                       {"probability", pt.probability},
                       {"count", pt.count}});
  }
  json out;
  out["support"] = std::move(support);
  out["mean_s0"] = s.mean_s0;
  out["mean_s1"] = s.mean_s1;
  out["is_exact"] = s.is_exact;
  out["assignment_count"] = s.assignment_count;
  out["df_treatment"] = s.df_treatment;
  out["df_residual"] = s.df_residual;
  return out;
}

json to_json(const TypeOneError& t) {
  json out;
  out["rejection_probability"] = t.rejection_probability;
  out["cutoff"] = t.cutoff;
  out["alpha"] = t.alpha;
  out["null_status"] = {{"neyman_null", t.null_status.neyman_null},
                        {"fisher_sharp_null", t.null_status.fisher_sharp_null}};
  return out;
}

json to_json(const SurvivalCurve& c) {
  return {{"k", c.k}, {"p_randomization", c.p_randomization}, {"p_reference", c.p_reference}};
}

json to_json(const MonteCarloReport& m) {
  json out;
  out["replications"] = m.replications;
  out["error_sd"] = m.error_sd;
  out["seed"] = m.seed;
  out["alpha"] = m.alpha;
  out["cutoff"] = m.cutoff;
  out["mean_rejection"] = m.mean_rejection;
  out["standard_error"] = number_or_null(m.standard_error);
  if (!m.per_replication.empty()) out["per_replication"] = m.per_replication;
  return out;
}

json make_report(std::string_view operation, json input, json result,
                 std::optional<std::uint64_t> seed) {
  json out;
  out["engine_version"] = std::string(kEngineVersion);
  out["operation"] = std::string(operation);
  out["input"] = std::move(input);
  out["result"] = std::move(result);
  if (seed) out["seed"] = *seed;
  return out;
}

void write_curve_csv(std::ostream& os, const SurvivalCurve& curve) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "k,p_randomization,p_reference\n";
  for (std::size_t m = 0; m < curve.k.size(); ++m) {
    buf << curve.k[m] << ',' << curve.p_randomization[m] << ',' << curve.p_reference[m] << '\n';
  }
  os << buf.str();
}

}  // namespace randinf
