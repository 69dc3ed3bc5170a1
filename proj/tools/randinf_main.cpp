// randinf: command-line front end for the randomization-inference engine.
//
// Every subcommand prints one JSON report on stdout. Exit status is 0 on
// success, 1 when a reproduction check fails, 2 for bad input or flags.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "randinf/error.hpp"
#include "randinf/expected_mean_squares.hpp"
#include "randinf/inference.hpp"
#include "randinf/io.hpp"
#include "randinf/randomization.hpp"
#include "randinf/reproduce.hpp"

#ifndef RANDINF_DEFAULT_DATA_DIR
#define RANDINF_DEFAULT_DATA_DIR "data"
#endif

namespace {

using nlohmann::json;
using namespace randinf;

constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

struct SpaceFlags {
  std::uint64_t sample = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> burn_in;
  std::string measure = "all";

  void attach(CLI::App* cmd) {
    cmd->add_option("--sample", sample,
                    "Use N uniformly sampled assignments instead of exact enumeration")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Seed for sampling and Monte Carlo draws");
    cmd->add_option("--burn-in", burn_in, "Markov moves between sampled Latin squares");
    cmd->add_option("--measure", measure, "Latin square randomization measure")
        ->check(CLI::IsMember({"all", "isotopy"}));
  }

  RandomizationSpace space() const {
    RandomizationSpace s = sample > 0 ? RandomizationSpace::sampled(sample, seed, burn_in)
                                      : RandomizationSpace::exact();
    s.measure = measure == "isotopy" ? LatinMeasure::Isotopy : LatinMeasure::AllSquares;
    return s;
  }

  json echo() const {
    json j = {{"sample", sample}, {"measure", measure}};
    if (burn_in) j["burn_in"] = *burn_in;
    return j;
  }
};

void emit(const json& report) { std::cout << report.dump(2) << '\n'; }

json table_echo(const std::string& path, const PotentialOutcomeTable& table) {
  return {{"path", path}, {"table", table_to_json(table)}};
}

std::string data_dir_default() {
  if (const char* env = std::getenv("RANDINF_DATA_DIR")) return env;
  return RANDINF_DEFAULT_DATA_DIR;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomization inference for randomized block and Latin square designs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  std::string table_path;
  double alpha = 0.05;
  SpaceFlags flags;

  auto* cmd_ems = app.add_subcommand("expected-ms", "Closed-form expected mean squares");
  cmd_ems->add_option("table", table_path, "Table document (JSON)")->required();

  auto* cmd_decompose = app.add_subcommand("decompose", "Finite-population decomposition");
  cmd_decompose->add_option("table", table_path, "Table document (JSON)")->required();

  double tolerance = kDefaultAdditivityTolerance;
  auto* cmd_additivity = app.add_subcommand("additivity", "Additivity and interaction diagnostics");
  cmd_additivity->add_option("table", table_path, "Table document (JSON)")->required();
  cmd_additivity->add_option("--tolerance", tolerance, "Absolute tolerance")
      ->check(CLI::NonNegativeNumber);

  std::size_t first = 1;
  std::size_t second = 2;
  auto* cmd_variance =
      app.add_subcommand("variance", "Randomization variance of a treatment-mean difference");
  cmd_variance->add_option("table", table_path, "Table document (JSON)")->required();
  cmd_variance->add_option("--t", first, "First treatment (one-based)")->check(CLI::PositiveNumber);
  cmd_variance->add_option("--u", second, "Second treatment (one-based)")->check(CLI::PositiveNumber);

  auto* cmd_dist = app.add_subcommand("distribution", "Randomization distribution of S0^2, S1^2, F");
  cmd_dist->add_option("table", table_path, "Table document (JSON)")->required();
  flags.attach(cmd_dist);

  auto* cmd_type1 = app.add_subcommand("type1", "Type I error of the standard ANOVA F-test");
  cmd_type1->add_option("table", table_path, "Table document (JSON)")->required();
  cmd_type1->add_option("--alpha", alpha, "Nominal level")->check(CLI::Range(0.0, 1.0));
  flags.attach(cmd_type1);

  std::size_t grid_points = kDefaultCurvePoints;
  std::string csv_path;
  auto* cmd_curve = app.add_subcommand("curve", "Survival curves P(F > k): randomization vs F");
  cmd_curve->add_option("table", table_path, "Table document (JSON)")->required();
  cmd_curve->add_option("--grid", grid_points, "Number of evenly spaced cutoffs")
      ->check(CLI::PositiveNumber);
  cmd_curve->add_option("--csv", csv_path, "Also write the curve as CSV");
  flags.attach(cmd_curve);

  double sigma_eps = kDefaultErrorSd;
  std::uint64_t reps = kDefaultReplications;
  bool retain = false;
  auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo Type I error with technical errors");
  cmd_mc->add_option("table", table_path, "Table document (JSON)")->required();
  cmd_mc->add_option("--sigma-eps", sigma_eps, "Technical error standard deviation")
      ->check(CLI::PositiveNumber);
  cmd_mc->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  cmd_mc->add_option("--alpha", alpha, "Nominal level")->check(CLI::Range(0.0, 1.0));
  cmd_mc->add_flag("--retain", retain, "Include per-replication rejection probabilities");
  flags.attach(cmd_mc);

  std::string design_name = "ls";
  std::size_t order = 0;
  std::size_t blocks = 0;
  auto* cmd_count = app.add_subcommand("enumerate-count", "Count assignments by enumeration");
  cmd_count->add_option("--design", design_name, "rcb or ls")->check(CLI::IsMember({"rcb", "ls"}));
  cmd_count->add_option("--order,--treatments", order, "Number of treatments")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_count->add_option("--blocks", blocks, "Number of blocks (rcb)")->check(CLI::PositiveNumber);
  flags.attach(cmd_count);

  std::string data_dir = data_dir_default();
  bool as_json = false;
  auto* cmd_reproduce = app.add_subcommand("reproduce", "Recompute every published value");
  cmd_reproduce->add_option("--data-dir", data_dir, "Directory holding table1.json .. table4.json");
  cmd_reproduce->add_flag("--json", as_json, "Machine-readable results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (cmd_ems->parsed()) {
      const auto table = load_table(table_path);
      json result = to_json(expected_ms(table));
      if (table.design() == Design::Ls) {
        result["ls_difference_decomposition"] = to_json(ls_difference_decomposition(table));
      }
      emit(make_report("expected-ms", table_echo(table_path, table), result));
    } else if (cmd_decompose->parsed()) {
      const auto table = load_table(table_path);
      emit(make_report("decompose", table_echo(table_path, table), to_json(decompose(table))));
    } else if (cmd_additivity->parsed()) {
      const auto table = load_table(table_path);
      json input = table_echo(table_path, table);
      input["tolerance"] = tolerance;
      emit(make_report("additivity", input, to_json(check_additivity(table, tolerance))));
    } else if (cmd_variance->parsed()) {
      const auto table = load_table(table_path);
      if (first > table.treatments() || second > table.treatments()) {
        throw Error(ErrorCode::InvalidArgument, "treatment index out of range");
      }
      json input = table_echo(table_path, table);
      input["t"] = first;
      input["u"] = second;
      emit(make_report("variance", input,
                       to_json(mean_difference_variance(table, first - 1, second - 1))));
    } else if (cmd_dist->parsed()) {
      const auto table = load_table(table_path);
      json input = table_echo(table_path, table);
      input["space"] = flags.echo();
      emit(make_report("distribution", input, to_json(exact_distribution(table, flags.space())),
                       flags.sample > 0 ? std::optional(flags.seed) : std::nullopt));
    } else if (cmd_type1->parsed()) {
      const auto table = load_table(table_path);
      json input = table_echo(table_path, table);
      input["alpha"] = alpha;
      input["space"] = flags.echo();
      emit(make_report("type1", input, to_json(type1_error(table, alpha, flags.space())),
                       flags.sample > 0 ? std::optional(flags.seed) : std::nullopt));
    } else if (cmd_curve->parsed()) {
      const auto table = load_table(table_path);
      const auto curve = survival_curve(table, grid_points, flags.space());
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + csv_path);
        write_curve_csv(out, curve);
      }
      json input = table_echo(table_path, table);
      input["grid"] = grid_points;
      input["space"] = flags.echo();
      emit(make_report("curve", input, to_json(curve),
                       flags.sample > 0 ? std::optional(flags.seed) : std::nullopt));
    } else if (cmd_mc->parsed()) {
      const auto table = load_table(table_path);
      json input = table_echo(table_path, table);
      input["sigma_eps"] = sigma_eps;
      input["reps"] = reps;
      input["alpha"] = alpha;
      input["space"] = flags.echo();
      const auto report =
          monte_carlo_with_errors(table, sigma_eps, reps, alpha, flags.seed, flags.space(), retain);
      emit(make_report("mc", input, to_json(report), flags.seed));
    } else if (cmd_count->parsed()) {
      const Design design = *parse_design(design_name);
      if (design == Design::Rcb && blocks == 0) {
        throw Error(ErrorCode::InvalidArgument, "--blocks is required for --design rcb");
      }
      const std::size_t rows = design == Design::Rcb ? blocks : order;
      const auto space = flags.space();
      const std::uint64_t counted =
          for_each_assignment(design, rows, order, space, [](const Assignment&) {});
      json input = {{"design", design_name}, {"treatments", order}, {"space", flags.echo()}};
      if (design == Design::Rcb) input["blocks"] = blocks;
      json result = {{"count", counted}};
      if (const auto closed = exact_space_size(design, rows, order, space.measure)) {
        result["closed_form"] = *closed;
      }
      emit(make_report("enumerate-count", input, result));
    } else if (cmd_reproduce->parsed()) {
      const auto report = reproduce(data_dir);
      if (as_json) {
        emit(make_report("reproduce", {{"data_dir", data_dir}}, to_json(report)));
      } else {
        print_report(std::cout, report);
      }
      return report.all_passed() ? 0 : kExitCheckFailed;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    if (e.code() == ErrorCode::SpaceTooLarge) {
      std::cerr << "hint: pass --sample N to draw N assignments uniformly instead\n";
    }
    return e.code() == ErrorCode::ConvergenceFailure ? kExitCheckFailed : kExitInputError;
  }
  return 0;
}
