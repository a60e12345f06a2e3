#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "airsim/model.hpp"
#include "airsim/workload.hpp"

namespace airsim {

struct DemandEstimate {
  TownId town{};
  double offered_load = 0.0;        // CPU units / s
  double surviving_capacity = 0.0;  // CPU units / s of operational edge servers
  double deficit = 0.0;             // max(0, offered / rho_target - surviving)

  friend bool operator==(const DemandEstimate&, const DemandEstimate&) = default;
};

DemandEstimate estimate_demand(TownId town, double offered_load, double surviving_capacity,
                               double rho_target);

/// UAVs of `uav_capacity` needed to cover `deficit`.
std::uint32_t uav_need(double deficit, double uav_capacity);

struct FleetAssignment {
  std::map<TownId, std::vector<NodeId>> towns;
  std::vector<NodeId> unassigned;

  [[nodiscard]] std::optional<TownId> town_of(NodeId uav) const;
  [[nodiscard]] std::size_t count(TownId town) const;
  [[nodiscard]] std::size_t assigned() const;

  friend bool operator==(const FleetAssignment&, const FleetAssignment&) = default;
};

/// Greedy capacity plan. Towns are served in descending deficit order (ties
/// by town id), each up to ceil(deficit / uav_capacity) UAVs, until the fleet
/// runs out. UAVs keep their current town whenever that town's allotment
/// still covers them, so an unchanged demand picture moves nobody.
FleetAssignment plan_assignment(std::span<const DemandEstimate> estimates,
                                std::span<const NodeId> fleet, double uav_capacity,
                                const FleetAssignment& current = {});

/// Order for one UAV; no town means return to the base.
struct DispatchCommand {
  NodeId uav{};
  std::optional<TownId> town;

  friend bool operator==(const DispatchCommand&, const DispatchCommand&) = default;
};

/// Periodic fleet controller hosted on the HAP.
class HapController {
 public:
  HapController(ControllerConfig config, double uav_capacity);

  [[nodiscard]] const ControllerConfig& config() const { return config_; }
  [[nodiscard]] const FleetAssignment& assignment() const { return assignment_; }
  [[nodiscard]] const std::vector<DemandEstimate>& last_estimates() const { return estimates_; }
  [[nodiscard]] std::uint64_t ticks() const { return ticks_; }

  /// Re-plans from `estimates` over the usable `fleet` and returns a command
  /// for every UAV whose assigned town changed.
  std::vector<DispatchCommand> tick(std::vector<DemandEstimate> estimates,
                                    std::span<const NodeId> fleet);

 private:
  ControllerConfig config_;
  double uav_capacity_;
  FleetAssignment assignment_;
  std::vector<DemandEstimate> estimates_;
  std::uint64_t ticks_ = 0;
};

/// Sliding-window arrival-rate meter (work units per second).
class ArrivalMeter {
 public:
  explicit ArrivalMeter(double window) : window_(window) {}

  void record(SimTime at, double units);
  /// Work per second observed over (now - window, now]; before a full window
  /// has elapsed since t=0 the rate is taken over (0, now].
  double rate(SimTime now);

 private:
  double window_;
  double sum_ = 0.0;
  std::deque<std::pair<SimTime, double>> samples_;
};

}  // namespace airsim
