#include "airsim/offload.hpp"

namespace airsim {

bool reachable_from(const ComputeNode& node, TownId town) {
  if (node.kind() == NodeKind::Edge) return node.operational() && node.station() == town;
  return node.in_range(town);
}

std::vector<std::size_t> reachable_nodes(TownId town, std::span<const ComputeNode> nodes) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (reachable_from(nodes[i], town)) out.push_back(i);
  }
  return out;
}

namespace {

bool better(const NodeEstimate& a, const NodeEstimate& b) {
  if (a.delay != b.delay) return a.delay < b.delay;
  if (a.kind != b.kind) return a.kind == NodeKind::Edge;
  return raw(a.node) < raw(b.node);
}

}  // namespace

std::optional<NodeId> choose_min_delay(std::span<const NodeEstimate> candidates) {
  const NodeEstimate* best = nullptr;
  for (const auto& c : candidates) {
    if (best == nullptr || better(c, *best)) best = &c;
  }
  if (best == nullptr) return std::nullopt;
  return best->node;
}

OffloadDecision select_target(const Task& task, std::span<const NodeEstimate> candidates,
                              SimTime now) {
  return {task.id, choose_min_delay(candidates), {candidates.begin(), candidates.end()}, now};
}

TaskFate complete_task(Task& task, const ComputeNode& node, SimTime service_end) {
  return task.complete(service_end + node.access_delay());
}

TaskFate rejection_fate(RejectReason reason) {
  return reason == RejectReason::Destroyed ? TaskFate::FailedNodeDestroyed
                                           : TaskFate::FailedNoTarget;
}

}  // namespace airsim
