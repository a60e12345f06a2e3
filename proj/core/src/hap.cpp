#include "airsim/hap.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace airsim {

DemandEstimate estimate_demand(TownId town, double offered_load, double surviving_capacity,
                               double rho_target) {
  if (!(rho_target > 0.0 && rho_target <= 1.0)) {
    throw std::invalid_argument("rho_target must be in (0, 1]");
  }
  const double required = offered_load / rho_target;
  return {town, offered_load, surviving_capacity, std::max(0.0, required - surviving_capacity)};
}

std::uint32_t uav_need(double deficit, double uav_capacity) {
  if (!(uav_capacity > 0.0)) throw std::invalid_argument("uav capacity must be positive");
  if (deficit <= 0.0) return 0;
  // Relative slack keeps an exact multiple (e.g. 100000 / 50000) from
  // rounding up through floating-point noise.
  return static_cast<std::uint32_t>(std::ceil(deficit / uav_capacity - 1e-9));
}

std::optional<TownId> FleetAssignment::town_of(NodeId uav) const {
  for (const auto& [town, ids] : towns) {
    if (std::find(ids.begin(), ids.end(), uav) != ids.end()) return town;
  }
  return std::nullopt;
}

std::size_t FleetAssignment::count(TownId town) const {
  auto it = towns.find(town);
  return it == towns.end() ? 0 : it->second.size();
}

std::size_t FleetAssignment::assigned() const {
  std::size_t n = 0;
  for (const auto& [town, ids] : towns) n += ids.size();
  return n;
}

FleetAssignment plan_assignment(std::span<const DemandEstimate> estimates,
                                std::span<const NodeId> fleet, double uav_capacity,
                                const FleetAssignment& current) {
  std::vector<const DemandEstimate*> order;
  order.reserve(estimates.size());
  for (const auto& e : estimates) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->deficit != b->deficit) return a->deficit > b->deficit;
    return raw(a->town) < raw(b->town);
  });

  std::map<TownId, std::size_t> allot;
  std::size_t left = fleet.size();
  for (const auto* e : order) {
    const std::size_t take = std::min<std::size_t>(uav_need(e->deficit, uav_capacity), left);
    allot[e->town] = take;
    left -= take;
  }

  const std::set<NodeId> usable(fleet.begin(), fleet.end());
  FleetAssignment plan;
  std::set<NodeId> placed;
  for (const auto* e : order) {
    auto& kept = plan.towns[e->town];
    auto it = current.towns.find(e->town);
    if (it == current.towns.end()) continue;
    for (NodeId id : it->second) {
      if (kept.size() >= allot[e->town]) break;
      if (usable.contains(id) && !placed.contains(id)) {
        kept.push_back(id);
        placed.insert(id);
      }
    }
  }

  std::vector<NodeId> free;
  for (NodeId id : fleet) {
    if (!placed.contains(id)) free.push_back(id);
  }
  std::sort(free.begin(), free.end(), [](NodeId a, NodeId b) { return raw(a) < raw(b); });
  auto next = free.begin();
  for (const auto* e : order) {
    auto& ids = plan.towns[e->town];
    while (ids.size() < allot[e->town] && next != free.end()) ids.push_back(*next++);
  }
  plan.unassigned.assign(next, free.end());
  return plan;
}

HapController::HapController(ControllerConfig config, double uav_capacity)
    : config_(config), uav_capacity_(uav_capacity) {}

std::vector<DispatchCommand> HapController::tick(std::vector<DemandEstimate> estimates,
                                                 std::span<const NodeId> fleet) {
  ++ticks_;
  FleetAssignment plan = plan_assignment(estimates, fleet, uav_capacity_, assignment_);
  std::vector<DispatchCommand> commands;
  std::vector<NodeId> ordered(fleet.begin(), fleet.end());
  std::sort(ordered.begin(), ordered.end(), [](NodeId a, NodeId b) { return raw(a) < raw(b); });
  const std::set<NodeId> known = [&] {
    std::set<NodeId> s;
    for (const auto& [town, ids] : assignment_.towns) s.insert(ids.begin(), ids.end());
    s.insert(assignment_.unassigned.begin(), assignment_.unassigned.end());
    return s;
  }();
  for (NodeId id : ordered) {
    const auto before = assignment_.town_of(id);
    const auto after = plan.town_of(id);
    // UAVs new to the controller start at the base, so only a town order
    // moves them.
    if (before != after && (known.contains(id) || after.has_value())) {
      commands.push_back({id, after});
    }
  }
  assignment_ = std::move(plan);
  estimates_ = std::move(estimates);
  return commands;
}

void ArrivalMeter::record(SimTime at, double units) {
  samples_.emplace_back(at, units);
  sum_ += units;
}

double ArrivalMeter::rate(SimTime now) {
  while (!samples_.empty() && samples_.front().first <= now - window_) {
    sum_ -= samples_.front().second;
    samples_.pop_front();
  }
  if (samples_.empty()) sum_ = 0.0;
  const double span = std::min(window_, now);
  if (span <= 0.0) return 0.0;
  return std::max(0.0, sum_) / span;
}

}  // namespace airsim
