#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "randinf/anova.hpp"
#include "randinf/expected_mean_squares.hpp"
#include "randinf/inference.hpp"
#include "randinf/potential_outcomes.hpp"
#include "randinf/randomization.hpp"

namespace randinf {

inline constexpr std::string_view kEngineVersion = "0.1.0";

/// Table documents:
///   {"name": "...", "design": "rcb"|"ls", "treatments": T, "blocks": N,
///    "outcomes": [[[x_11(1), ..., x_11(T)], ...], ...],
///    "technical_error_sd": 0.0}
/// "blocks" is required for rcb and rejected for ls; "name" and
/// "technical_error_sd" are optional. Errors name the offending field.
PotentialOutcomeTable table_from_json(const nlohmann::json& doc);
nlohmann::json table_to_json(const PotentialOutcomeTable& table);

/// Throws Error{ParseError} for unreadable files or malformed JSON and
/// Error{ValidationError} for schema violations.
PotentialOutcomeTable load_table(const std::filesystem::path& path);

nlohmann::json to_json(const Decomposition& d);
nlohmann::json to_json(const AdditivityReport& r);
nlohmann::json to_json(const Assignment& a);
nlohmann::json to_json(const AnovaSummary& s);
nlohmann::json to_json(const ExpectedMeanSquares& e);
nlohmann::json to_json(const LsDifferenceDecomposition& d);
nlohmann::json to_json(const MeanDifferenceVariance& v);
nlohmann::json to_json(const RandomizationSummary& s);
nlohmann::json to_json(const TypeOneError& t);
nlohmann::json to_json(const SurvivalCurve& c);
nlohmann::json to_json(const MonteCarloReport& m);
nlohmann::json to_json(const FStatistic& f);

/// Report envelope: engine version, operation, input echo, result, seed.
nlohmann::json make_report(std::string_view operation, nlohmann::json input,
                           nlohmann::json result,
                           std::optional<std::uint64_t> seed = std::nullopt);

/// Header `k,p_randomization,p_reference`, 17 significant digits.
void write_curve_csv(std::ostream& os, const SurvivalCurve& curve);

}  // namespace randinf
