// YAML reader/writer for scenario files.

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "airsim/workload.hpp"

namespace airsim {
namespace {

class Reader {
 public:
  std::vector<std::string>& problems() { return problems_; }

  template <class T>
  T get(const YAML::Node& node, const char* key, const std::string& where, T fallback,
        bool required) {
    const YAML::Node v = node[key];
    if (!v) {
      if (required) problems_.push_back(where + ": missing key '" + key + "'");
      return fallback;
    }
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      problems_.push_back(where + ": key '" + key + "' has the wrong type");
      return fallback;
    }
  }

  double num(const YAML::Node& n, const char* key, const std::string& where, double fallback,
             bool required = true) {
    return get<double>(n, key, where, fallback, required);
  }
  std::uint32_t id(const YAML::Node& n, const char* key, const std::string& where) {
    return get<std::uint32_t>(n, key, where, 0, true);
  }

  GeoPosition position(const YAML::Node& n, const std::string& where) {
    if (!n || !n.IsMap()) {
      problems_.push_back(where + ": expected a map with x and y");
      return {};
    }
    return {num(n, "x", where, 0.0), num(n, "y", where, 0.0),
            num(n, "altitude", where, 0.0, false)};
  }

  ApplicationProfile profile(const YAML::Node& n, const std::string& where) {
    ApplicationProfile p;
    p.task_size = CpuUnits{num(n, "task_size", where, 0.0)};
    p.tolerable_delay = num(n, "tolerable_delay", where, 0.0);
    p.mean_interarrival = num(n, "mean_interarrival", where, 0.0);
    return p;
  }

  UserGroup group(const YAML::Node& n, const std::string& where, double default_from) {
    UserGroup g;
    g.id = GroupId{id(n, "id", where)};
    g.town = TownId{id(n, "town", where)};
    g.user_count = get<std::uint32_t>(n, "users", where, 0, true);
    g.profile = profile(n, where);
    g.active_from = num(n, "active_from", where, default_from, false);
    if (n["active_until"]) g.active_until = num(n, "active_until", where, 0.0);
    const auto mode = get<std::string>(n, "arrivals", where, "poisson", false);
    if (mode == "fixed") {
      g.arrivals = ArrivalMode::Fixed;
    } else if (mode != "poisson") {
      problems_.push_back(where + ": arrivals must be 'poisson' or 'fixed'");
    }
    return g;
  }

  template <class Fn>
  void each(const YAML::Node& root, const char* key, bool required, Fn&& fn) {
    const YAML::Node list = root[key];
    if (!list) {
      if (required) problems_.push_back(std::string("missing key '") + key + "'");
      return;
    }
    if (!list.IsSequence()) {
      problems_.push_back(std::string("'") + key + "' must be a list");
      return;
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      fn(list[i], std::string(key) + "[" + std::to_string(i) + "]");
    }
  }

 private:
  std::vector<std::string> problems_;
};

ScenarioEvent read_event(Reader& r, const YAML::Node& n, const std::string& where) {
  ScenarioEvent ev;
  ev.at = r.num(n, "at", where, 0.0);
  int kinds = 0;
  if (n["destroy_node"]) {
    ++kinds;
    ev.effect = DestroyNode{NodeId{r.get<std::uint32_t>(n, "destroy_node", where, 0, true)}};
  }
  if (const auto sp = n["set_profile"]) {
    ++kinds;
    ev.effect = SetProfile{GroupId{r.id(sp, "group", where + ".set_profile")},
                           r.profile(sp, where + ".set_profile")};
  }
  if (const auto ag = n["add_group"]) {
    ++kinds;
    ev.effect = AddGroup{r.group(ag, where + ".add_group", ev.at)};
  }
  if (const auto df = n["deploy_fleet"]) {
    ++kinds;
    DeployFleet d;
    d.count = r.get<std::uint32_t>(df, "count", where + ".deploy_fleet", 0, true);
    d.first_id = NodeId{r.id(df, "first_id", where + ".deploy_fleet")};
    d.base = r.position(df["base"], where + ".deploy_fleet.base");
    ev.effect = d;
  }
  if (kinds != 1) {
    r.problems().push_back(where +
                           ": needs exactly one of destroy_node, set_profile, add_group, "
                           "deploy_fleet");
  }
  return ev;
}

// Shortest round-trip text, so 3.33 stays "3.33" in the file.
std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

void emit_profile(YAML::Emitter& out, const ApplicationProfile& p) {
  out << YAML::Key << "task_size" << YAML::Value << num(p.task_size.value());
  out << YAML::Key << "tolerable_delay" << YAML::Value << num(p.tolerable_delay);
  out << YAML::Key << "mean_interarrival" << YAML::Value << num(p.mean_interarrival);
}

void emit_position(YAML::Emitter& out, const GeoPosition& p) {
  out << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "x" << YAML::Value << num(p.x);
  out << YAML::Key << "y" << YAML::Value << num(p.y);
  out << YAML::EndMap;
}

void emit_group(YAML::Emitter& out, const UserGroup& g) {
  out << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << raw(g.id);
  out << YAML::Key << "town" << YAML::Value << raw(g.town);
  out << YAML::Key << "users" << YAML::Value << g.user_count;
  emit_profile(out, g.profile);
  out << YAML::Key << "active_from" << YAML::Value << num(g.active_from);
  if (g.active_until) out << YAML::Key << "active_until" << YAML::Value << num(*g.active_until);
  if (g.arrivals != ArrivalMode::Poisson) {
    out << YAML::Key << "arrivals" << YAML::Value << std::string(to_string(g.arrivals));
  }
  out << YAML::EndMap;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ScenarioError({std::string("malformed scenario document: ") + e.what()});
  }
  if (!root.IsMap()) throw ScenarioError({"scenario document must be a map"});

  Reader r;
  Scenario s;
  s.name = r.get<std::string>(root, "name", "scenario", "custom", false);
  s.duration = r.num(root, "duration", "scenario", 0.0);
  s.seed = r.get<std::uint64_t>(root, "seed", "scenario", 1, false);

  r.each(root, "towns", true, [&](const YAML::Node& n, const std::string& where) {
    Town t;
    t.id = TownId{r.id(n, "id", where)};
    t.name = r.get<std::string>(n, "name", where, "Town-" + std::to_string(raw(t.id)), false);
    t.anchor = r.position(n["anchor"], where + ".anchor");
    s.towns.push_back(std::move(t));
  });

  r.each(root, "edge_servers", false, [&](const YAML::Node& n, const std::string& where) {
    EdgeServerSpec e;
    e.id = NodeId{r.id(n, "id", where)};
    e.town = TownId{r.id(n, "town", where)};
    e.capacity = Capacity{r.num(n, "capacity", where, 0.0)};
    e.access_delay = r.num(n, "access_delay", where, e.access_delay, false);
    s.edge_servers.push_back(e);
  });

  if (const auto f = root["uav_fleet"]) {
    const std::string where = "uav_fleet";
    auto& fl = s.fleet;
    fl.count = r.get<std::uint32_t>(f, "count", where, 0, true);
    fl.first_id = NodeId{r.get<std::uint32_t>(f, "first_id", where, raw(fl.first_id), false)};
    fl.capacity = Capacity{r.num(f, "capacity", where, fl.capacity.value(), false)};
    fl.access_delay = r.num(f, "access_delay", where, fl.access_delay, false);
    fl.altitude = r.num(f, "altitude", where, fl.altitude, false);
    fl.radius = r.num(f, "radius", where, fl.radius, false);
    fl.speed = r.num(f, "speed", where, fl.speed, false);
    if (f["base"]) fl.base = r.position(f["base"], where + ".base");
    fl.base.altitude = fl.altitude;
  }

  r.each(root, "groups", true, [&](const YAML::Node& n, const std::string& where) {
    s.groups.push_back(r.group(n, where, 0.0));
  });
  r.each(root, "events", false, [&](const YAML::Node& n, const std::string& where) {
    s.events.push_back(read_event(r, n, where));
  });
  for (auto& ev : s.events) {
    if (auto* d = std::get_if<DeployFleet>(&ev.effect)) d->base.altitude = s.fleet.altitude;
  }

  if (const auto c = root["controller"]) {
    const std::string where = "controller";
    auto& cc = s.controller;
    cc.enabled = r.get<bool>(c, "enabled", where, cc.enabled, false);
    cc.tick_interval = r.num(c, "tick_interval", where, cc.tick_interval, false);
    cc.rho_target = r.num(c, "rho_target", where, cc.rho_target, false);
    cc.measure_window = r.num(c, "measure_window", where, cc.measure_window, false);
    cc.telemetry_staleness =
        r.num(c, "telemetry_staleness", where, cc.telemetry_staleness, false);
    const auto mode = r.get<std::string>(c, "demand_mode", where, "oracle", false);
    if (mode == "measured") {
      cc.demand_mode = DemandMode::Measured;
    } else if (mode != "oracle") {
      r.problems().push_back("controller: demand_mode must be 'oracle' or 'measured'");
    }
  }
  if (const auto m = root["metrics"]) {
    s.metrics.window = r.num(m, "window", "metrics", s.metrics.window, false);
  }

  if (!r.problems().empty()) throw ScenarioError(std::move(r.problems()));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({"cannot read scenario file " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_yaml(const Scenario& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << s.name;
  out << YAML::Key << "duration" << YAML::Value << num(s.duration);
  out << YAML::Key << "seed" << YAML::Value << s.seed;

  out << YAML::Key << "towns" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : s.towns) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << raw(t.id);
    out << YAML::Key << "name" << YAML::Value << t.name;
    out << YAML::Key << "anchor" << YAML::Value;
    emit_position(out, t.anchor);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "edge_servers" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : s.edge_servers) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << raw(e.id);
    out << YAML::Key << "town" << YAML::Value << raw(e.town);
    out << YAML::Key << "capacity" << YAML::Value << num(e.capacity.value());
    out << YAML::Key << "access_delay" << YAML::Value << num(e.access_delay);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& f = s.fleet;
  out << YAML::Key << "uav_fleet" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "count" << YAML::Value << f.count;
  out << YAML::Key << "first_id" << YAML::Value << raw(f.first_id);
  out << YAML::Key << "capacity" << YAML::Value << num(f.capacity.value());
  out << YAML::Key << "access_delay" << YAML::Value << num(f.access_delay);
  out << YAML::Key << "altitude" << YAML::Value << num(f.altitude);
  out << YAML::Key << "radius" << YAML::Value << num(f.radius);
  out << YAML::Key << "speed" << YAML::Value << num(f.speed);
  out << YAML::Key << "base" << YAML::Value;
  emit_position(out, f.base);
  out << YAML::EndMap;

  out << YAML::Key << "groups" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : s.groups) emit_group(out, g);
  out << YAML::EndSeq;

  out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
  for (const auto& ev : s.events) {
    out << YAML::BeginMap;
    out << YAML::Key << "at" << YAML::Value << num(ev.at);
    std::visit(
        [&](const auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, DestroyNode>) {
            out << YAML::Key << "destroy_node" << YAML::Value << raw(e.node);
          } else if constexpr (std::is_same_v<E, SetProfile>) {
            out << YAML::Key << "set_profile" << YAML::Value << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "group" << YAML::Value << raw(e.group);
            emit_profile(out, e.profile);
            out << YAML::EndMap;
          } else if constexpr (std::is_same_v<E, AddGroup>) {
            out << YAML::Key << "add_group" << YAML::Value;
            emit_group(out, e.group);
          } else {
            out << YAML::Key << "deploy_fleet" << YAML::Value << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "count" << YAML::Value << e.count;
            out << YAML::Key << "first_id" << YAML::Value << raw(e.first_id);
            out << YAML::Key << "base" << YAML::Value;
            emit_position(out, e.base);
            out << YAML::EndMap;
          }
        },
        ev.effect);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& c = s.controller;
  out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << c.enabled;
  out << YAML::Key << "tick_interval" << YAML::Value << num(c.tick_interval);
  out << YAML::Key << "rho_target" << YAML::Value << num(c.rho_target);
  out << YAML::Key << "demand_mode" << YAML::Value << std::string(to_string(c.demand_mode));
  out << YAML::Key << "measure_window" << YAML::Value << num(c.measure_window);
  out << YAML::Key << "telemetry_staleness" << YAML::Value << num(c.telemetry_staleness);
  out << YAML::EndMap;

  out << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "window" << YAML::Value << num(s.metrics.window);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace airsim
