#include "airsim/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace airsim {
namespace {

std::vector<TownId> town_ids(const Scenario& s) {
  std::vector<TownId> ids;
  for (const auto& t : s.towns) ids.push_back(t.id);
  return ids;
}

SimTime resolve_horizon(const Scenario& s, const SimulationOptions& o) {
  validate(s);
  if (o.until && !(*o.until > 0.0)) throw std::invalid_argument("until must be positive");
  return o.until ? std::min(*o.until, s.duration) : s.duration;
}

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

void trace_row(std::ostream& out, const Task& t) {
  out << t.id << ',' << raw(t.town) << ',' << raw(t.group) << ',';
  if (t.node) out << raw(*t.node);
  out << ',' << num(t.created_at) << ',';
  if (t.terminal()) out << num(t.resolved_at);
  out << ',';
  if (t.completed_at) out << num(*t.completed_at);
  out << ',' << to_string(t.fate) << '\n';
}

}  // namespace

Simulation::Simulation(Scenario scenario, SimulationOptions options)
    : scenario_(std::move(scenario)),
      horizon_(resolve_horizon(scenario_, options)),
      seed_(options.seed.value_or(scenario_.seed)),
      trace_(options.trace),
      metrics_(town_ids(scenario_), horizon_, options.window.value_or(scenario_.metrics.window)) {
  scenario_.seed = seed_;
  scenario_.metrics.window = metrics_.width();
  for (const auto& e : scenario_.edge_servers) {
    const Town* town = scenario_.find_town(e.town);
    node_index_[e.id] = nodes_.size();
    nodes_.push_back(ComputeNode::edge(e.id, e.town, e.capacity, e.access_delay, town->anchor));
  }
  add_uavs(scenario_.fleet.count, scenario_.fleet.first_id, scenario_.fleet.base);

  const auto& cc = scenario_.controller;
  if (cc.enabled) {
    controller_ = std::make_unique<HapController>(cc, scenario_.fleet.capacity.value());
  }
  if (cc.demand_mode == DemandMode::Measured) {
    meters_.assign(scenario_.towns.size(), ArrivalMeter(cc.measure_window));
  }
  if (trace_ != nullptr) *trace_ << kTraceHeader << '\n';

  // Scenario mutations go first so that, at equal timestamps, the controller
  // and arrivals already see their effect.
  for (std::uint32_t i = 0; i < scenario_.events.size(); ++i) {
    queue_.schedule(scenario_.events[i].at, ScenarioAction{i});
  }
  for (const auto& g : scenario_.groups) add_group(g);
  if (controller_) queue_.schedule(0.0, ControllerTick{});
  if (cc.telemetry_staleness > 0.0) queue_.schedule(0.0, TelemetryRefresh{});
}

const ComputeNode& Simulation::node(NodeId id) const { return nodes_[index_of(id)]; }

std::size_t Simulation::index_of(NodeId id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw std::out_of_range("unknown node " + std::to_string(raw(id)));
  return it->second;
}

std::size_t Simulation::town_slot(TownId town) const {
  for (std::size_t i = 0; i < scenario_.towns.size(); ++i) {
    if (scenario_.towns[i].id == town) return i;
  }
  throw std::out_of_range("unknown town " + std::to_string(raw(town)));
}

void Simulation::add_uavs(std::uint32_t count, NodeId first_id, const GeoPosition& base) {
  const auto& f = scenario_.fleet;
  GeoPosition at = base;
  at.altitude = f.altitude;
  for (std::uint32_t i = 0; i < count; ++i) {
    const NodeId id{raw(first_id) + i};
    node_index_[id] = nodes_.size();
    home_base_[id] = at;
    nodes_.push_back(ComputeNode::uav(id, f.capacity, f.access_delay,
                                      UavFlightSpec{f.radius, f.altitude, f.speed}, at));
  }
  telemetry_.resize(nodes_.size(), 0.0);
}

void Simulation::add_group(const UserGroup& group) {
  const auto slot = static_cast<std::uint32_t>(groups_.size());
  group_index_[group.id] = slot;
  groups_.push_back({ArrivalProcess(group, RandomStream(seed_, raw(group.id))), 0});
  schedule_group(slot);
}

void Simulation::schedule_group(std::uint32_t slot) {
  const SimTime t = groups_[slot].process.next_time();
  if (std::isfinite(t) && t <= horizon_) {
    queue_.schedule(std::max(t, queue_.now()), GroupArrival{slot, groups_[slot].epoch});
  }
}

std::vector<NodeId> Simulation::usable_fleet() const {
  std::vector<NodeId> ids;
  for (const auto& n : nodes_) {
    if (n.kind() == NodeKind::Uav && !n.destroyed()) ids.push_back(n.id());
  }
  return ids;
}

double Simulation::oracle_offered_load(TownId town) const {
  const SimTime t = queue_.now();
  double load = 0.0;
  for (const auto& slot : groups_) {
    const auto& g = slot.process.group();
    if (g.town != town || g.active_from > t) continue;
    if (g.active_until && *g.active_until <= t) continue;
    load += g.offered_load();
  }
  return load;
}

std::vector<DemandEstimate> Simulation::estimate_all() {
  const auto& cc = scenario_.controller;
  std::vector<DemandEstimate> out;
  for (std::size_t i = 0; i < scenario_.towns.size(); ++i) {
    const TownId town = scenario_.towns[i].id;
    const double offered = cc.demand_mode == DemandMode::Measured
                               ? meters_[i].rate(queue_.now())
                               : oracle_offered_load(town);
    double surviving = 0.0;
    for (const auto& n : nodes_) {
      if (n.kind() == NodeKind::Edge && n.operational() && n.station() == town) {
        surviving += n.capacity().value();
      }
    }
    out.push_back(estimate_demand(town, offered, surviving, cc.rho_target));
  }
  return out;
}

void Simulation::run_until(SimTime t) {
  if (finished_) throw std::logic_error("simulation already finished");
  queue_.run_until(std::min(t, horizon_), [this](const Queue::Event& e) { dispatch(e); });
}

void Simulation::dispatch(const Queue::Event& event) {
  std::visit([this](const auto& payload) { on(payload); }, event.payload);
}

void Simulation::on(const GroupArrival& e) {
  auto& slot = groups_[e.group];
  if (e.epoch != slot.epoch) return;
  Task task = slot.process.pop(next_task_id_++);
  schedule_group(e.group);
  metrics_.note_generated(task);
  if (!meters_.empty()) meters_[town_slot(task.town)].record(task.created_at, task.size.value());
  offload(std::move(task));
}

void Simulation::offload(Task task) {
  const SimTime now = queue_.now();
  const bool stale = scenario_.controller.telemetry_staleness > 0.0;
  scratch_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!reachable_from(n, task.town)) continue;
    scratch_.push_back({n.id(), n.kind(), stale ? telemetry_[i] : n.estimated_queueing_delay(now)});
  }
  const auto chosen = choose_min_delay(scratch_);
  if (!chosen) {
    fail(task, TaskFate::FailedNoTarget);
    return;
  }
  const std::size_t idx = index_of(*chosen);
  task.node = *chosen;
  std::uint32_t slot = 0;
  if (free_slots_.empty()) {
    slot = static_cast<std::uint32_t>(in_transit_.size());
    in_transit_.push_back(std::move(task));
  } else {
    slot = free_slots_.back();
    free_slots_.pop_back();
    in_transit_[slot] = std::move(task);
  }
  queue_.schedule(now + nodes_[idx].access_delay(),
                  NodeArrival{static_cast<std::uint32_t>(idx), slot});
}

void Simulation::on(const NodeArrival& e) {
  auto& node = nodes_[e.node];
  Task task = std::move(in_transit_[e.slot]);
  free_slots_.push_back(e.slot);
  const Admission a = node.enqueue(task, queue_.now());
  if (!a.accepted) {
    fail(task, rejection_fate(a.reason));
    return;
  }
  if (a.completion_at) queue_.schedule(*a.completion_at, ServiceDone{e.node});
}

void Simulation::on(const ServiceDone& e) {
  auto& node = nodes_[e.node];
  if (node.destroyed()) return;
  ServiceCompletion done = node.finish_service(queue_.now());
  complete_task(done.task, node, queue_.now());
  resolve(done.task);
  if (done.next_completion_at) queue_.schedule(*done.next_completion_at, ServiceDone{e.node});
}

void Simulation::on(const UavLanding& e) { nodes_[e.node].land(queue_.now()); }

void Simulation::on(const ControllerTick&) {
  const SimTime now = queue_.now();
  const auto fleet = usable_fleet();
  const auto commands = controller_->tick(estimate_all(), fleet);
  for (const auto& cmd : commands) {
    const std::size_t idx = index_of(cmd.uav);
    auto& uav = nodes_[idx];
    GeoPosition target = home_base_.at(cmd.uav);
    if (cmd.town) {
      const auto& anchor = scenario_.towns[town_slot(*cmd.town)].anchor;
      target = {anchor.x, anchor.y, uav.flight_spec().altitude};
    }
    const SimTime arrival = uav.fly_to(target, cmd.town, now);
    dispatches_.push_back({now, cmd, arrival});
    if (arrival > now) queue_.schedule(arrival, UavLanding{static_cast<std::uint32_t>(idx)});
  }
  const SimTime next = now + scenario_.controller.tick_interval;
  if (next <= horizon_) queue_.schedule(next, ControllerTick{});
}

void Simulation::on(const TelemetryRefresh&) {
  const SimTime now = queue_.now();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    telemetry_[i] = nodes_[i].destroyed() ? 0.0 : nodes_[i].estimated_queueing_delay(now);
  }
  const SimTime next = now + scenario_.controller.telemetry_staleness;
  if (next <= horizon_) queue_.schedule(next, TelemetryRefresh{});
}

void Simulation::on(const ScenarioAction& e) {
  const SimTime now = queue_.now();
  const ScenarioEvent& ev = scenario_.events[e.index];
  std::visit(
      [&](const auto& effect) {
        using E = std::decay_t<decltype(effect)>;
        if constexpr (std::is_same_v<E, DestroyNode>) {
          for (Task& t : nodes_[index_of(effect.node)].destroy(now)) {
            fail(t, TaskFate::FailedNodeDestroyed);
          }
        } else if constexpr (std::is_same_v<E, SetProfile>) {
          const std::uint32_t slot = group_index_.at(effect.group);
          groups_[slot].process.set_profile(effect.profile, now);
          ++groups_[slot].epoch;
          schedule_group(slot);
        } else if constexpr (std::is_same_v<E, AddGroup>) {
          add_group(effect.group);
        } else {
          add_uavs(effect.count, effect.first_id, effect.base);
        }
      },
      ev.effect);
}

void Simulation::fail(Task& task, TaskFate fate) {
  task.fail(fate, queue_.now());
  resolve(task);
}

void Simulation::resolve(Task& task) {
  metrics_.record(task);
  if (trace_ != nullptr) trace_row(*trace_, task);
}

RunResult Simulation::finish() {
  run_until(horizon_);
  finished_ = true;

  std::vector<std::uint64_t> pending(scenario_.towns.size(), 0);
  for (auto& n : nodes_) {
    n.settle(horizon_);
    n.for_each_queued([&](const Task& t) {
      ++pending[town_slot(t.town)];
      if (trace_ != nullptr) trace_row(*trace_, t);
    });
  }
  queue_.for_each_pending([&](const Queue::Event& e) {
    if (const auto* a = std::get_if<NodeArrival>(&e.payload)) {
      const Task& t = in_transit_[a->slot];
      ++pending[town_slot(t.town)];
      if (trace_ != nullptr) trace_row(*trace_, t);
    }
  });
  for (std::size_t i = 0; i < pending.size(); ++i) {
    metrics_.set_pending(scenario_.towns[i].id, pending[i]);
  }

  RunResult r;
  r.summary = metrics_.summary(scenario_.name, seed_, to_yaml(scenario_));
  for (const auto& t : scenario_.towns) r.series[t.id] = metrics_.time_series(t.id);
  for (const auto& n : nodes_) r.nodes.push_back({n.id(), n.kind(), n.state(), n.stats()});
  r.dispatches = dispatches_;
  r.events_fired = queue_.fired();
  return r;
}

RunResult run_scenario(const Scenario& scenario, SimulationOptions options) {
  Simulation sim(scenario, options);
  return sim.finish();
}

}  // namespace airsim
