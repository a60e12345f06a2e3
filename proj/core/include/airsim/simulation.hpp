#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "airsim/engine.hpp"
#include "airsim/hap.hpp"
#include "airsim/metrics.hpp"
#include "airsim/nodes.hpp"
#include "airsim/offload.hpp"
#include "airsim/workload.hpp"

namespace airsim {

struct SimulationOptions {
  /// Replaces the scenario seed.
  std::optional<std::uint64_t> seed;
  /// Replaces the scenario's metrics window width.
  std::optional<double> window;
  /// Stop time; defaults to the scenario duration.
  std::optional<SimTime> until;
  /// When set, one CSV record per task is written here.
  std::ostream* trace = nullptr;
};

struct NodeReport {
  NodeId id{};
  NodeKind kind = NodeKind::Edge;
  NodeState state = NodeState::Operational;
  QueueStats stats;
};

struct DispatchRecord {
  SimTime at = 0.0;
  DispatchCommand command;
  SimTime arrives_at = 0.0;
};

struct RunResult {
  RunSummary summary;
  TimeSeriesTable series;
  std::vector<NodeReport> nodes;
  std::vector<DispatchRecord> dispatches;
  std::uint64_t events_fired = 0;
};

inline constexpr const char* kTraceHeader =
    "task,town,group,node,created_at,resolved_at,completed_at,fate";

/// One run of a scenario: wires arrival processes, compute nodes, the
/// offloading policy, the HAP controller and metrics onto the event queue.
class Simulation {
 public:
  /// Throws ScenarioError if the scenario is invalid.
  explicit Simulation(Scenario scenario, SimulationOptions options = {});

  [[nodiscard]] SimTime now() const { return queue_.now(); }
  [[nodiscard]] SimTime horizon() const { return horizon_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const Scenario& scenario() const { return scenario_; }
  [[nodiscard]] std::span<const ComputeNode> nodes() const { return nodes_; }
  [[nodiscard]] const ComputeNode& node(NodeId id) const;
  [[nodiscard]] const MetricsCollector& metrics() const { return metrics_; }
  /// Null when the controller is disabled.
  [[nodiscard]] const HapController* controller() const { return controller_.get(); }
  [[nodiscard]] const std::vector<DispatchRecord>& dispatches() const { return dispatches_; }
  [[nodiscard]] std::uint64_t generated() const { return next_task_id_; }

  /// Offered load of the town's active groups, from their profiles.
  [[nodiscard]] double oracle_offered_load(TownId town) const;
  /// Demand estimates the controller would compute now.
  [[nodiscard]] std::vector<DemandEstimate> estimate_all();

  /// Advances to `t` (clamped to the horizon).
  void run_until(SimTime t);
  /// Runs to the horizon and returns the outputs. Further calls are errors.
  RunResult finish();

 private:
  struct GroupArrival {
    std::uint32_t group;
    std::uint32_t epoch;
  };
  struct NodeArrival {
    std::uint32_t node;
    std::uint32_t slot;  // into in_transit_
  };
  struct ServiceDone {
    std::uint32_t node;
  };
  struct UavLanding {
    std::uint32_t node;
  };
  struct ControllerTick {};
  struct TelemetryRefresh {};
  struct ScenarioAction {
    std::uint32_t index;
  };
  using Payload = std::variant<GroupArrival, NodeArrival, ServiceDone, UavLanding, ControllerTick,
                               TelemetryRefresh, ScenarioAction>;
  using Queue = EventQueue<Payload>;

  struct GroupSlot {
    ArrivalProcess process;
    std::uint32_t epoch = 0;
  };

  void dispatch(const Queue::Event& event);
  void on(const GroupArrival& e);
  void on(const NodeArrival& e);
  void on(const ServiceDone& e);
  void on(const UavLanding& e);
  void on(const ControllerTick& e);
  void on(const TelemetryRefresh& e);
  void on(const ScenarioAction& e);

  void add_group(const UserGroup& group);
  void schedule_group(std::uint32_t slot);
  void add_uavs(std::uint32_t count, NodeId first_id, const GeoPosition& base);
  void offload(Task task);
  void resolve(Task& task);
  void fail(Task& task, TaskFate fate);
  std::size_t index_of(NodeId id) const;
  std::size_t town_slot(TownId town) const;
  std::vector<NodeId> usable_fleet() const;

  Scenario scenario_;
  SimTime horizon_;
  std::uint64_t seed_;
  std::ostream* trace_;
  Queue queue_;

  std::vector<ComputeNode> nodes_;
  std::map<NodeId, std::size_t> node_index_;
  std::map<NodeId, GeoPosition> home_base_;
  std::vector<GroupSlot> groups_;
  std::map<GroupId, std::uint32_t> group_index_;

  std::unique_ptr<HapController> controller_;
  std::vector<ArrivalMeter> meters_;  // per town slot, measured demand mode
  std::vector<double> telemetry_;     // per node, stale delay snapshot
  std::vector<DispatchRecord> dispatches_;

  MetricsCollector metrics_;
  std::vector<NodeEstimate> scratch_;
  std::vector<Task> in_transit_;
  std::vector<std::uint32_t> free_slots_;
  std::uint64_t next_task_id_ = 0;
  bool finished_ = false;
};

/// Convenience: build, run to the horizon, finish.
RunResult run_scenario(const Scenario& scenario, SimulationOptions options = {});

}  // namespace airsim
