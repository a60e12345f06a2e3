#pragma once

#include <optional>
#include <span>
#include <vector>

#include "airsim/model.hpp"
#include "airsim/nodes.hpp"

namespace airsim {

/// Queueing-delay estimate of one candidate node as seen by a user.
struct NodeEstimate {
  NodeId node{};
  NodeKind kind = NodeKind::Edge;
  double delay = 0.0;  // seconds

  friend bool operator==(const NodeEstimate&, const NodeEstimate&) = default;
};

struct OffloadDecision {
  std::uint64_t task = 0;
  std::optional<NodeId> chosen;
  std::vector<NodeEstimate> consulted;
  SimTime decided_at = 0.0;
};

/// True when `node` accepts offloads from users in `town`.
bool reachable_from(const ComputeNode& node, TownId town);

/// Nodes that can take a task from `town`: its operational edge servers and
/// every UAV on station there. Indices refer to `nodes`.
std::vector<std::size_t> reachable_nodes(TownId town, std::span<const ComputeNode> nodes);

/// Minimum-delay choice. Exact ties go to edge servers, then to the lowest
/// node id. Empty input yields no choice.
std::optional<NodeId> choose_min_delay(std::span<const NodeEstimate> candidates);

OffloadDecision select_target(const Task& task, std::span<const NodeEstimate> candidates,
                              SimTime now);

/// Result of `task` leaves `node` at `service_end` and reaches the user one
/// access delay later; the deadline check decides the fate.
TaskFate complete_task(Task& task, const ComputeNode& node, SimTime service_end);

/// Fate for a task that a node refused on arrival.
TaskFate rejection_fate(RejectReason reason);

}  // namespace airsim
