#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace randinf {

/// One published number checked against a recomputation.
struct ReproductionCheck {
  enum class Relation { Within, LessThan };

  std::string id;
  std::string description;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Within;
  bool passed = false;
};

struct ReproductionReport {
  std::vector<ReproductionCheck> checks;

  bool all_passed() const;
};

/// Recomputes every published value from table1.json .. table4.json in
/// `data_dir`. Missing or invalid fixtures propagate as Error.
ReproductionReport reproduce(const std::filesystem::path& data_dir);

nlohmann::json to_json(const ReproductionReport& report);
void print_report(std::ostream& os, const ReproductionReport& report);

}  // namespace randinf
