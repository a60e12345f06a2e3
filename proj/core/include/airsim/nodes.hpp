#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "airsim/model.hpp"

namespace airsim {

enum class NodeKind : std::uint8_t { Edge, Uav };
/// Edge servers are Operational or Destroyed. For UAVs Operational means
/// hovering (on station at a town, or parked at the base).
enum class NodeState : std::uint8_t { Operational, Flying, Destroyed };
enum class RejectReason : std::uint8_t { Flying, Destroyed };

std::string_view to_string(NodeKind kind);
std::string_view to_string(NodeState state);

/// Per-node queueing statistics, accumulated over the node's lifetime.
struct QueueStats {
  std::uint64_t admitted = 0;
  std::uint64_t started = 0;
  std::uint64_t served = 0;
  double total_wait = 0.0;       // enqueue -> start of service
  double total_sojourn = 0.0;    // enqueue -> end of service
  double work_done = 0.0;        // CPU units
  double busy_time = 0.0;
  double area_in_system = 0.0;   // integral of tasks in system over time
};

struct Admission {
  bool accepted = false;
  RejectReason reason = RejectReason::Destroyed;
  /// Set when the task went straight into service on an idle node.
  std::optional<SimTime> completion_at;
};

/// A finished service. The next task (if any) has started service and will
/// complete at `next_completion_at`.
struct ServiceCompletion {
  Task task;
  std::optional<SimTime> next_completion_at;
};

struct UavFlightSpec {
  double radius = 100.0;
  double altitude = 200.0;
  double speed = 20.0;
};

/// Single-server FIFO compute node with an infinite buffer. Edge servers and
/// UAVs share the queue; UAVs add a flight state machine.
class ComputeNode {
 public:
  static ComputeNode edge(NodeId id, TownId town, Capacity capacity, double access_delay,
                          GeoPosition position);
  static ComputeNode uav(NodeId id, Capacity capacity, double access_delay, UavFlightSpec flight,
                         GeoPosition position);

  [[nodiscard]] NodeId id() const { return id_; }
  [[nodiscard]] NodeKind kind() const { return kind_; }
  [[nodiscard]] NodeState state() const { return state_; }
  [[nodiscard]] Capacity capacity() const { return capacity_; }
  [[nodiscard]] double access_delay() const { return access_delay_; }
  [[nodiscard]] bool operational() const { return state_ == NodeState::Operational; }
  [[nodiscard]] bool destroyed() const { return state_ == NodeState::Destroyed; }
  [[nodiscard]] std::size_t queue_length() const { return queue_.size(); }
  [[nodiscard]] const QueueStats& stats() const { return stats_; }

  /// Edge servers: their town. UAVs: the town they serve while on station.
  [[nodiscard]] std::optional<TownId> station() const { return station_; }
  [[nodiscard]] std::optional<TownId> destination_town() const { return destination_town_; }
  [[nodiscard]] std::optional<GeoPosition> destination() const { return destination_; }
  [[nodiscard]] const UavFlightSpec& flight_spec() const { return flight_; }

  /// Position at `now`; interpolated along the route while flying.
  [[nodiscard]] GeoPosition position(SimTime now) const;

  /// Remaining work of queued and in-service tasks at `now`.
  [[nodiscard]] CpuUnits backlog(SimTime now) const;

  /// Wait before a task enqueued at `now` would begin service.
  /// Throws std::logic_error on a destroyed node.
  [[nodiscard]] double estimated_queueing_delay(SimTime now) const;

  /// Appends `task` to the queue. Flying UAVs and destroyed nodes reject.
  Admission enqueue(Task task, SimTime now);

  /// Removes the task in service, which must finish exactly at `now`.
  ServiceCompletion finish_service(SimTime now);

  /// Every queued and in-service task, removed and returned in FIFO order.
  /// Throws std::logic_error if already destroyed.
  std::vector<Task> destroy(SimTime now);

  /// Starts a flight and returns the arrival time. A zero-length flight
  /// lands immediately. Throws std::logic_error for edge servers and
  /// destroyed UAVs.
  SimTime fly_to(const GeoPosition& destination, std::optional<TownId> town, SimTime now);

  /// Completes the current flight. Returns false if there is no flight in
  /// progress that lands at `now` (e.g. it was redirected).
  bool land(SimTime now);

  /// Membership coverage: an on-station UAV serves exactly its station town.
  [[nodiscard]] bool in_range(TownId town) const;

  /// Visits queued tasks (in-service first) in FIFO order.
  template <class Fn>
  void for_each_queued(Fn&& fn) const {
    for (const auto& q : queue_) fn(q.task);
  }

  /// Closes the time integral used for queue-length statistics.
  void settle(SimTime now);

 private:
  ComputeNode(NodeId id, NodeKind kind, Capacity capacity, double access_delay,
              GeoPosition position);

  struct Queued {
    Task task;
    SimTime enqueued_at;
  };

  void start_head(SimTime now);

  NodeId id_;
  NodeKind kind_;
  NodeState state_ = NodeState::Operational;
  Capacity capacity_;
  double access_delay_;
  std::optional<TownId> station_;
  UavFlightSpec flight_{};

  // Flight bookkeeping.
  GeoPosition position_;
  GeoPosition origin_;
  std::optional<GeoPosition> destination_;
  std::optional<TownId> destination_town_;
  SimTime departed_at_ = 0.0;
  SimTime arrives_at_ = 0.0;

  std::deque<Queued> queue_;
  CpuUnits queued_work_{};  // total size of everything in queue_
  SimTime service_started_at_ = 0.0;

  QueueStats stats_;
  SimTime last_change_ = 0.0;
};

}  // namespace airsim
