#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "airsim/metrics.hpp"
#include "airsim/simulation.hpp"
#include "airsim/workload.hpp"

namespace airsim::cli {

/// Builtin scenario names accepted wherever a scenario path is.
inline constexpr std::string_view kBuiltinBaseline = "disaster-baseline";
inline constexpr std::string_view kBuiltinUav = "disaster-uav";

struct RunRequest {
  std::string scenario;  // builtin name or path to a scenario file
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = ".";
  std::optional<double> window;
  std::optional<double> until;
  bool trace = false;
  bool plot = false;
  /// Seeds simulated concurrently; 0 picks the hardware concurrency.
  unsigned jobs = 1;
};

/// Builtin name or file path to a scenario. Throws ScenarioError.
Scenario resolve_scenario(const std::string& name_or_path);

/// "1,2,3", "1-10" or combinations such as "1,5-7". Throws
/// std::invalid_argument on malformed input.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

struct SeedFiles {
  std::filesystem::path time_series;
  std::filesystem::path summary;
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> plot;
};

SeedFiles output_files(const RunRequest& request, std::uint64_t seed);

/// Runs one seed and writes its files.
RunResult run_seed(const Scenario& scenario, const RunRequest& request, std::uint64_t seed);

/// Every seed of `request`. Returns the process exit status: 0 on success,
/// 2 for scenario problems (all listed on `err`), 1 for I/O failures.
int run(const RunRequest& request, std::ostream& log, std::ostream& err);

struct PhaseRow {
  TownId town{};
  SimTime from = 0.0;
  SimTime to = 0.0;
  std::optional<double> baseline;
  std::optional<double> treatment;

  [[nodiscard]] std::optional<double> delta() const;
};

struct ComparisonReport {
  std::vector<PhaseRow> rows;
};

/// Per-town, per-phase mean success rates of two sets of runs (each side's
/// runs are averaged). Phases are [bounds[i], bounds[i+1]); when `bounds` is
/// empty the disaster phases 0/1000/2000/end are used. Throws
/// std::invalid_argument when town sets or windowing differ.
ComparisonReport compare(const std::vector<TimeSeriesTable>& baseline,
                         const std::vector<TimeSeriesTable>& treatment,
                         std::vector<double> bounds = {});

void write_comparison(std::ostream& out, const ComparisonReport& report);

TimeSeriesTable load_time_series(const std::filesystem::path& path);

}  // namespace airsim::cli
