#pragma once

#include <optional>
#include <string_view>

namespace randinf {

/// Randomized complete block or Latin square.
enum class Design { Rcb, Ls };

constexpr std::string_view to_string(Design d) {
  return d == Design::Rcb ? "rcb" : "ls";
}

inline std::optional<Design> parse_design(std::string_view s) {
  if (s == "rcb") return Design::Rcb;
  if (s == "ls") return Design::Ls;
  return std::nullopt;
}

}  // namespace randinf
