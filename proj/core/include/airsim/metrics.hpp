#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airsim/model.hpp"

namespace airsim {

struct SuccessWindow {
  TownId town{};
  SimTime window_start = 0.0;
  SimTime window_end = 0.0;
  std::uint64_t completed = 0;
  std::uint64_t succeeded = 0;

  /// succeeded / completed; empty when nothing resolved in the window.
  [[nodiscard]] std::optional<double> rate() const;

  friend bool operator==(const SuccessWindow&, const SuccessWindow&) = default;
};

struct TownTotals {
  std::uint64_t generated = 0;
  std::uint64_t succeeded = 0;
  std::uint64_t failed_deadline = 0;
  std::uint64_t failed_no_target = 0;
  std::uint64_t failed_node_destroyed = 0;
  std::uint64_t pending_at_end = 0;

  [[nodiscard]] std::uint64_t resolved() const {
    return succeeded + failed_deadline + failed_no_target + failed_node_destroyed;
  }
  /// generated == resolved + pending_at_end.
  [[nodiscard]] bool conserved() const { return generated == resolved() + pending_at_end; }

  friend bool operator==(const TownTotals&, const TownTotals&) = default;
};

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  SimTime horizon = 0.0;
  double window = 0.0;
  std::map<TownId, TownTotals> towns;
  /// Overall succeeded / resolved.
  double success_rate = 0.0;
  /// Scenario echo, as YAML.
  std::string config;
};

/// Per-town tumbling-window success counters.
class MetricsCollector {
 public:
  /// Windows of `width` tile [0, horizon); the last one may be shorter.
  MetricsCollector(std::vector<TownId> towns, SimTime horizon, double width);

  [[nodiscard]] double width() const { return width_; }
  [[nodiscard]] SimTime horizon() const { return horizon_; }
  [[nodiscard]] const std::vector<TownId>& towns() const { return towns_; }

  void note_generated(const Task& task);

  /// Counts a resolved task in the window containing task.resolved_at
  /// (clamped into the last window). Throws std::logic_error for pending
  /// tasks and for a task id recorded twice.
  void record(const Task& task);

  void set_pending(TownId town, std::uint64_t pending);

  [[nodiscard]] std::vector<SuccessWindow> time_series(TownId town) const;
  [[nodiscard]] const TownTotals& totals(TownId town) const;
  [[nodiscard]] RunSummary summary(std::string scenario, std::uint64_t seed,
                                   std::string config) const;

 private:
  std::size_t town_index(TownId town) const;

  std::vector<TownId> towns_;
  SimTime horizon_;
  double width_;
  std::size_t windows_;
  std::vector<TownTotals> totals_;
  std::vector<std::vector<std::uint64_t>> completed_;
  std::vector<std::vector<std::uint64_t>> succeeded_;
  std::vector<bool> recorded_;
};

/// Series for several towns, keyed by town.
using TimeSeriesTable = std::map<TownId, std::vector<SuccessWindow>>;

inline constexpr const char* kTimeSeriesHeader = "town,window_start,window_end,completed,succeeded,rate";

void write_time_series_csv(std::ostream& out, const TimeSeriesTable& table);
/// Throws std::runtime_error on a malformed file.
TimeSeriesTable read_time_series_csv(std::istream& in);

void write_summary(std::ostream& out, const RunSummary& summary);

/// Success rate vs time, one polyline per town, as a standalone SVG.
void write_svg_plot(std::ostream& out, const TimeSeriesTable& table, const std::string& title);

/// Mean of the defined window rates among windows lying inside [from, to).
/// Empty when no such window has a rate.
std::optional<double> mean_rate(const std::vector<SuccessWindow>& series, SimTime from,
                                SimTime to);

}  // namespace airsim
