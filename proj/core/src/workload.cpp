#include "airsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace airsim {

std::string_view to_string(ArrivalMode mode) {
  return mode == ArrivalMode::Poisson ? "poisson" : "fixed";
}

std::string_view to_string(DemandMode mode) {
  return mode == DemandMode::Oracle ? "oracle" : "measured";
}

double UserGroup::offered_load() const {
  return static_cast<double>(user_count) * profile.task_size.value() / profile.mean_interarrival;
}

const Town* Scenario::find_town(TownId id) const {
  auto it = std::find_if(towns.begin(), towns.end(), [id](const Town& t) { return t.id == id; });
  return it == towns.end() ? nullptr : &*it;
}

namespace {

std::string join_lines(const std::vector<std::string>& problems) {
  std::string out = "invalid scenario:";
  for (const auto& p : problems) out += "\n  - " + p;
  return out;
}

std::string fmt_time(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

class ProblemCollector {
 public:
  void add(std::string what) { problems_.push_back(std::move(what)); }
  void check(bool ok, const std::string& what) {
    if (!ok) add(what);
  }
  std::vector<std::string> take() { return std::move(problems_); }

 private:
  std::vector<std::string> problems_;
};

void check_group(ProblemCollector& pc, const UserGroup& g, const std::set<std::uint32_t>& towns,
                 double duration) {
  const std::string tag = "group " + std::to_string(raw(g.id));
  pc.check(towns.contains(raw(g.town)),
           tag + ": dangling id, town " + std::to_string(raw(g.town)) + " does not exist");
  pc.check(g.user_count >= 1, tag + ": user_count must be >= 1");
  pc.check(g.profile.valid(),
           tag + ": task_size, tolerable_delay and mean_interarrival must all be positive");
  pc.check(g.active_from >= 0.0 && g.active_from <= duration,
           tag + ": active_from " + fmt_time(g.active_from) + " outside [0, duration]");
  if (g.active_until) {
    pc.check(g.active_from < *g.active_until, tag + ": active_from must precede active_until");
  }
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

std::vector<std::string> find_problems(const Scenario& s) {
  ProblemCollector pc;
  pc.check(s.duration > 0.0, "duration must be positive");
  pc.check(s.metrics.window > 0.0, "metrics.window must be positive");

  std::set<std::uint32_t> towns;
  for (const auto& t : s.towns) {
    if (!towns.insert(raw(t.id)).second) pc.add("duplicate town id " + std::to_string(raw(t.id)));
    pc.check(t.anchor.altitude == 0.0,
             "town " + std::to_string(raw(t.id)) + ": anchor altitude must be 0");
  }
  pc.check(!s.towns.empty(), "at least one town is required");

  std::set<std::uint32_t> nodes;
  auto claim_node = [&](NodeId id) {
    if (!nodes.insert(raw(id)).second) pc.add("duplicate node id " + std::to_string(raw(id)));
  };
  for (const auto& e : s.edge_servers) {
    const std::string tag = "edge server " + std::to_string(raw(e.id));
    claim_node(e.id);
    pc.check(towns.contains(raw(e.town)),
             tag + ": dangling id, town " + std::to_string(raw(e.town)) + " does not exist");
    pc.check(e.capacity.value() > 0.0, tag + ": capacity must be positive");
    pc.check(e.access_delay >= 0.0, tag + ": access_delay must be non-negative");
  }

  bool any_uav = s.fleet.count > 0;
  for (std::uint32_t i = 0; i < s.fleet.count; ++i) claim_node(NodeId{raw(s.fleet.first_id) + i});
  for (const auto& ev : s.events) {
    if (const auto* d = std::get_if<DeployFleet>(&ev.effect)) {
      any_uav = true;
      pc.check(d->count >= 1, "deploy_fleet at t=" + fmt_time(ev.at) + ": count must be >= 1");
      for (std::uint32_t i = 0; i < d->count; ++i) claim_node(NodeId{raw(d->first_id) + i});
    }
  }
  if (any_uav) {
    pc.check(s.fleet.capacity.value() > 0.0, "uav_fleet.capacity must be positive");
    pc.check(s.fleet.speed > 0.0, "uav_fleet.speed must be positive");
    pc.check(s.fleet.radius > 0.0, "uav_fleet.radius must be positive");
    pc.check(s.fleet.altitude >= 0.0, "uav_fleet.altitude must be non-negative");
    pc.check(s.fleet.access_delay >= 0.0, "uav_fleet.access_delay must be non-negative");
  }

  std::set<std::uint32_t> groups;
  for (const auto& g : s.groups) {
    if (!groups.insert(raw(g.id)).second)
      pc.add("duplicate group id " + std::to_string(raw(g.id)));
    check_group(pc, g, towns, s.duration);
  }

  const auto& c = s.controller;
  pc.check(c.tick_interval > 0.0, "controller.tick_interval must be positive");
  pc.check(c.rho_target > 0.0 && c.rho_target <= 1.0, "controller.rho_target must be in (0, 1]");
  pc.check(c.measure_window > 0.0, "controller.measure_window must be positive");
  pc.check(c.telemetry_staleness >= 0.0, "controller.telemetry_staleness must be non-negative");

  // Events are checked in firing order so that references to groups added by
  // earlier events and repeated destruction are both detected.
  std::vector<const ScenarioEvent*> ordered;
  for (const auto& ev : s.events) ordered.push_back(&ev);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->at < b->at; });
  std::set<std::uint32_t> destroyed;
  for (const auto* ev : ordered) {
    const std::string tag = "event at t=" + fmt_time(ev->at);
    if (ev->at < 0.0) pc.add(tag + ": negative time");
    if (ev->at > s.duration) pc.add(tag + ": event beyond duration " + fmt_time(s.duration));
    std::visit(
        [&](const auto& effect) {
          using E = std::decay_t<decltype(effect)>;
          if constexpr (std::is_same_v<E, DestroyNode>) {
            const auto id = raw(effect.node);
            if (!nodes.contains(id)) {
              pc.add(tag + ": dangling id, node " + std::to_string(id) + " does not exist");
            } else if (!destroyed.insert(id).second) {
              pc.add(tag + ": node " + std::to_string(id) + " is already destroyed");
            }
          } else if constexpr (std::is_same_v<E, SetProfile>) {
            pc.check(groups.contains(raw(effect.group)),
                     tag + ": dangling id, group " + std::to_string(raw(effect.group)) +
                         " does not exist");
            pc.check(effect.profile.valid(), tag + ": profile fields must all be positive");
          } else if constexpr (std::is_same_v<E, AddGroup>) {
            if (!groups.insert(raw(effect.group.id)).second)
              pc.add(tag + ": duplicate group id " + std::to_string(raw(effect.group.id)));
            check_group(pc, effect.group, towns, s.duration);
            pc.check(effect.group.active_from == ev->at,
                     tag + ": added group must become active at the event time");
          }
        },
        ev->effect);
  }
  return pc.take();
}

const Scenario& validate(const Scenario& scenario) {
  auto problems = find_problems(scenario);
  if (!problems.empty()) throw ScenarioError(std::move(problems));
  return scenario;
}

Scenario build_disaster_scenario(bool air_support) {
  // Towns on a line 200 m apart, UAV base at the middle town.
  constexpr double kTownSpacing = 200.0;
  constexpr double kQuake = 1000.0;
  constexpr double kDoubling = 2000.0;

  Scenario s;
  s.name = air_support ? "disaster-uav" : "disaster-baseline";
  s.duration = 4000.0;
  s.seed = 1;
  for (std::uint32_t i = 1; i <= 3; ++i) {
    s.towns.push_back({TownId{i}, "Town-" + std::to_string(i),
                       GeoPosition{kTownSpacing * (i - 1), 0.0, 0.0}});
    s.edge_servers.push_back({NodeId{i}, TownId{i}, Capacity{100'000.0}, 0.001});
  }

  s.fleet.count = 8;
  s.fleet.first_id = NodeId{101};
  s.fleet.capacity = Capacity{50'000.0};
  s.fleet.access_delay = 0.005;
  s.fleet.altitude = 200.0;
  s.fleet.radius = 100.0;
  s.fleet.speed = 20.0;
  s.fleet.base = GeoPosition{kTownSpacing, 0.0, 200.0};

  const ApplicationProfile calm{CpuUnits{90.0}, 1.0, 3.33};
  const ApplicationProfile calm_tolerant{CpuUnits{90.0}, 2.0, 3.33};
  const ApplicationProfile panic{CpuUnits{90.0}, 1.0, 1.0};
  const ApplicationProfile panic_tolerant{CpuUnits{90.0}, 2.0, 1.0};
  const ApplicationProfile rescue{CpuUnits{90.0}, 1.0, 1.0};
  const ApplicationProfile aftershock{CpuUnits{12.0}, 5.0, 1.0};

  for (std::uint32_t i = 1; i <= 3; ++i) {
    UserGroup g;
    g.id = GroupId{i};
    g.town = TownId{i};
    g.user_count = 1000;
    g.profile = (i == 3) ? calm_tolerant : calm;
    s.groups.push_back(g);
  }

  s.events.push_back({kQuake, DestroyNode{NodeId{1}}});
  for (std::uint32_t i = 1; i <= 3; ++i) {
    s.events.push_back({kQuake, SetProfile{GroupId{i}, i == 3 ? panic_tolerant : panic}});
  }
  for (std::uint32_t i = 1; i <= 3; ++i) {
    UserGroup g;
    g.id = GroupId{3 + i};
    g.town = TownId{i};
    g.user_count = 1000;
    g.profile = (i == 3) ? aftershock : rescue;
    g.active_from = kDoubling;
    s.events.push_back({kDoubling, AddGroup{g}});
  }

  s.controller.enabled = air_support;
  s.controller.tick_interval = 10.0;
  s.controller.rho_target = 1.0;
  s.controller.demand_mode = DemandMode::Oracle;
  s.metrics.window = 100.0;
  return s;
}

ArrivalProcess::ArrivalProcess(UserGroup group, RandomStream stream)
    : group_(std::move(group)), stream_(std::move(stream)) {
  reset(group_.active_from);
}

double ArrivalProcess::gap() {
  if (group_.arrivals == ArrivalMode::Fixed) return group_.profile.mean_interarrival;
  return stream_.exponential(group_.profile.mean_interarrival);
}

double ArrivalProcess::first_offset() {
  // Fixed-interval users get a uniform random phase; Poisson is memoryless.
  if (group_.arrivals == ArrivalMode::Fixed) {
    return stream_.uniform() * group_.profile.mean_interarrival;
  }
  return stream_.exponential(group_.profile.mean_interarrival);
}

void ArrivalProcess::reset(SimTime from) {
  heap_.clear();
  heap_.reserve(group_.user_count);
  for (std::uint32_t u = 0; u < group_.user_count; ++u) {
    heap_.push_back({from + first_offset(), u});
  }
  std::make_heap(heap_.begin(), heap_.end(), Later{});
}

SimTime ArrivalProcess::next_time() const {
  constexpr double kNever = std::numeric_limits<double>::infinity();
  if (heap_.empty()) return kNever;
  const SimTime t = heap_.front().at;
  if (group_.active_until && t >= *group_.active_until) return kNever;
  return t;
}

Task ArrivalProcess::pop(std::uint64_t task_id) {
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Pending& p = heap_.back();
  Task task;
  task.id = task_id;
  task.group = group_.id;
  task.town = group_.town;
  task.created_at = p.at;
  task.size = group_.profile.task_size;
  task.tolerable_delay = group_.profile.tolerable_delay;
  p.at += gap();
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return task;
}

void ArrivalProcess::set_profile(const ApplicationProfile& profile, SimTime now) {
  group_.profile = profile;
  reset(std::max(now, group_.active_from));
}

}  // namespace airsim
