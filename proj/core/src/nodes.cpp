#include "airsim/nodes.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace airsim {

std::string_view to_string(NodeKind kind) { return kind == NodeKind::Edge ? "edge" : "uav"; }

std::string_view to_string(NodeState state) {
  switch (state) {
    case NodeState::Operational:
      return "operational";
    case NodeState::Flying:
      return "flying";
    case NodeState::Destroyed:
      return "destroyed";
  }
  return "?";
}

ComputeNode::ComputeNode(NodeId id, NodeKind kind, Capacity capacity, double access_delay,
                         GeoPosition position)
    : id_(id),
      kind_(kind),
      capacity_(capacity),
      access_delay_(access_delay),
      position_(position),
      origin_(position) {
  if (!(capacity.value() > 0.0)) {
    throw std::invalid_argument("node " + std::to_string(raw(id)) + ": capacity must be positive");
  }
}

ComputeNode ComputeNode::edge(NodeId id, TownId town, Capacity capacity, double access_delay,
                              GeoPosition position) {
  ComputeNode n(id, NodeKind::Edge, capacity, access_delay, position);
  n.station_ = town;
  return n;
}

ComputeNode ComputeNode::uav(NodeId id, Capacity capacity, double access_delay,
                             UavFlightSpec flight, GeoPosition position) {
  if (!(flight.radius > 0.0) || !(flight.speed > 0.0)) {
    throw std::invalid_argument("uav " + std::to_string(raw(id)) +
                                ": radius and speed must be positive");
  }
  ComputeNode n(id, NodeKind::Uav, capacity, access_delay, position);
  n.flight_ = flight;
  return n;
}

GeoPosition ComputeNode::position(SimTime now) const {
  if (state_ != NodeState::Flying || !destination_) return position_;
  const double span = arrives_at_ - departed_at_;
  const double f = span > 0.0 ? std::clamp((now - departed_at_) / span, 0.0, 1.0) : 1.0;
  return {origin_.x + (destination_->x - origin_.x) * f,
          origin_.y + (destination_->y - origin_.y) * f,
          origin_.altitude + (destination_->altitude - origin_.altitude) * f};
}

CpuUnits ComputeNode::backlog(SimTime now) const {
  if (queue_.empty()) return CpuUnits{0.0};
  const CpuUnits head = queue_.front().task.size;
  const CpuUnits done = std::min(work_in(capacity_, std::max(0.0, now - service_started_at_)), head);
  return CpuUnits{std::max(0.0, (queued_work_ - done).value())};
}

double ComputeNode::estimated_queueing_delay(SimTime now) const {
  if (destroyed()) {
    throw std::logic_error("node " + std::to_string(raw(id_)) + " is destroyed");
  }
  return backlog(now) / capacity_;
}

void ComputeNode::settle(SimTime now) {
  if (now > last_change_) {
    stats_.area_in_system += static_cast<double>(queue_.size()) * (now - last_change_);
    if (!queue_.empty()) stats_.busy_time += now - last_change_;
    last_change_ = now;
  }
}

void ComputeNode::start_head(SimTime now) {
  service_started_at_ = now;
  ++stats_.started;
  stats_.total_wait += now - queue_.front().enqueued_at;
}

Admission ComputeNode::enqueue(Task task, SimTime now) {
  if (state_ == NodeState::Destroyed) return {false, RejectReason::Destroyed, std::nullopt};
  if (state_ == NodeState::Flying) return {false, RejectReason::Flying, std::nullopt};
  settle(now);
  task.node = id_;
  queued_work_ += task.size;
  queue_.push_back({std::move(task), now});
  ++stats_.admitted;
  Admission a{true, RejectReason::Destroyed, std::nullopt};
  if (queue_.size() == 1) {
    start_head(now);
    a.completion_at = now + queue_.front().task.size / capacity_;
  }
  return a;
}

ServiceCompletion ComputeNode::finish_service(SimTime now) {
  if (queue_.empty()) {
    throw std::logic_error("node " + std::to_string(raw(id_)) + ": no task in service");
  }
  settle(now);
  Queued done = std::move(queue_.front());
  queue_.pop_front();
  ++stats_.served;
  stats_.total_sojourn += now - done.enqueued_at;
  stats_.work_done += done.task.size.value();
  queued_work_ -= done.task.size;

  ServiceCompletion out{std::move(done.task), std::nullopt};
  if (queue_.empty()) {
    queued_work_ = CpuUnits{0.0};
  } else {
    start_head(now);
    out.next_completion_at = now + queue_.front().task.size / capacity_;
  }
  return out;
}

std::vector<Task> ComputeNode::destroy(SimTime now) {
  if (destroyed()) {
    throw std::logic_error("node " + std::to_string(raw(id_)) + " is already destroyed");
  }
  settle(now);
  position_ = position(now);
  state_ = NodeState::Destroyed;
  station_.reset();
  destination_.reset();
  destination_town_.reset();
  std::vector<Task> lost;
  lost.reserve(queue_.size());
  for (auto& q : queue_) lost.push_back(std::move(q.task));
  queue_.clear();
  queued_work_ = CpuUnits{0.0};
  return lost;
}

SimTime ComputeNode::fly_to(const GeoPosition& destination, std::optional<TownId> town,
                            SimTime now) {
  if (kind_ != NodeKind::Uav) {
    throw std::logic_error("node " + std::to_string(raw(id_)) + " is not a UAV");
  }
  if (destroyed()) {
    throw std::logic_error("uav " + std::to_string(raw(id_)) + " is destroyed");
  }
  const GeoPosition here = position(now);
  const double dist = distance(here, destination);
  position_ = here;
  if (dist == 0.0) {
    state_ = NodeState::Operational;
    station_ = town;
    destination_.reset();
    destination_town_.reset();
    return now;
  }
  origin_ = here;
  destination_ = destination;
  destination_town_ = town;
  departed_at_ = now;
  arrives_at_ = now + dist / flight_.speed;
  state_ = NodeState::Flying;
  station_.reset();
  return arrives_at_;
}

bool ComputeNode::land(SimTime now) {
  if (state_ != NodeState::Flying || now != arrives_at_) return false;
  position_ = *destination_;
  station_ = destination_town_;
  destination_.reset();
  destination_town_.reset();
  state_ = NodeState::Operational;
  return true;
}

bool ComputeNode::in_range(TownId town) const {
  return kind_ == NodeKind::Uav && state_ == NodeState::Operational && station_ == town;
}

}  // namespace airsim
