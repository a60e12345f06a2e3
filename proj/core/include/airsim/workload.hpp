#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "airsim/engine.hpp"
#include "airsim/model.hpp"

namespace airsim {

struct Town {
  TownId id{};
  std::string name;
  GeoPosition anchor;  // altitude must be 0

  friend bool operator==(const Town&, const Town&) = default;
};

enum class ArrivalMode { Poisson, Fixed };

std::string_view to_string(ArrivalMode mode);

/// A cohort of identical users living in one town.
struct UserGroup {
  GroupId id{};
  TownId town{};
  std::uint32_t user_count = 1;
  ApplicationProfile profile;
  SimTime active_from = 0.0;
  std::optional<SimTime> active_until;
  ArrivalMode arrivals = ArrivalMode::Poisson;

  /// Work offered per second: users x task size / mean interarrival.
  [[nodiscard]] double offered_load() const;

  friend bool operator==(const UserGroup&, const UserGroup&) = default;
};

struct EdgeServerSpec {
  NodeId id{};
  TownId town{};
  Capacity capacity{100'000.0};
  double access_delay = 0.001;  // one-way, seconds

  friend bool operator==(const EdgeServerSpec&, const EdgeServerSpec&) = default;
};

/// Identical UAVs staged at a common base.
struct FleetSpec {
  std::uint32_t count = 0;
  NodeId first_id{101};
  Capacity capacity{50'000.0};
  double access_delay = 0.005;  // one-way, seconds
  double altitude = 200.0;      // meters
  double radius = 100.0;        // meters, horizontal offloading range
  double speed = 20.0;          // meters per second
  GeoPosition base;             // altitude is taken from `altitude`

  friend bool operator==(const FleetSpec&, const FleetSpec&) = default;
};

enum class DemandMode { Oracle, Measured };

std::string_view to_string(DemandMode mode);

struct ControllerConfig {
  bool enabled = false;
  double tick_interval = 10.0;
  double rho_target = 1.0;
  DemandMode demand_mode = DemandMode::Oracle;
  /// Sliding window for DemandMode::Measured.
  double measure_window = 30.0;
  /// Queue telemetry refresh period seen by users; 0 means exact live values.
  double telemetry_staleness = 0.0;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

struct MetricsConfig {
  double window = 100.0;

  friend bool operator==(const MetricsConfig&, const MetricsConfig&) = default;
};

struct DestroyNode {
  NodeId node{};
  friend bool operator==(const DestroyNode&, const DestroyNode&) = default;
};
struct SetProfile {
  GroupId group{};
  ApplicationProfile profile;
  friend bool operator==(const SetProfile&, const SetProfile&) = default;
};
struct AddGroup {
  UserGroup group;
  friend bool operator==(const AddGroup&, const AddGroup&) = default;
};
/// Adds `count` UAVs (ids first_id, first_id+1, ...) at `base`, with the
/// fleet's per-UAV parameters.
struct DeployFleet {
  std::uint32_t count = 0;
  NodeId first_id{};
  GeoPosition base;
  friend bool operator==(const DeployFleet&, const DeployFleet&) = default;
};

using ScenarioEffect = std::variant<DestroyNode, SetProfile, AddGroup, DeployFleet>;

struct ScenarioEvent {
  SimTime at = 0.0;
  ScenarioEffect effect;

  friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

struct Scenario {
  std::string name = "custom";
  SimTime duration = 4000.0;
  std::uint64_t seed = 1;
  std::vector<Town> towns;
  std::vector<EdgeServerSpec> edge_servers;
  FleetSpec fleet;
  std::vector<UserGroup> groups;
  std::vector<ScenarioEvent> events;
  ControllerConfig controller;
  MetricsConfig metrics;

  [[nodiscard]] const Town* find_town(TownId id) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Raised when a scenario cannot be parsed or fails validation. Carries every
/// problem found, not only the first.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Every consistency problem of `scenario`; empty when valid.
std::vector<std::string> find_problems(const Scenario& scenario);

/// Returns `scenario` unchanged or throws ScenarioError listing all problems.
const Scenario& validate(const Scenario& scenario);

/// The three-town earthquake case study. With `air_support` the HAP
/// controller is enabled and dispatches the 8-UAV fleet.
Scenario build_disaster_scenario(bool air_support = true);

/// Scenario file (YAML) support.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string to_yaml(const Scenario& scenario);

/// Task generator of one user group. Each user emits tasks independently;
/// tasks are stamped with the profile in force at their creation instant.
class ArrivalProcess {
 public:
  ArrivalProcess(UserGroup group, RandomStream stream);

  [[nodiscard]] const UserGroup& group() const { return group_; }
  [[nodiscard]] const ApplicationProfile& profile() const { return group_.profile; }

  /// Creation time of the next task, +inf once the group is inactive.
  [[nodiscard]] SimTime next_time() const;

  /// Emits the next task (created at next_time()) and draws that user's
  /// following emission.
  Task pop(std::uint64_t task_id);

  /// New profile for arrivals after `now`. Pending user draws are redrawn
  /// from `now`; tasks already emitted keep their stamps.
  void set_profile(const ApplicationProfile& profile, SimTime now);

 private:
  double gap();
  double first_offset();

  struct Pending {
    SimTime at;
    std::uint32_t user;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.user > b.user;
    }
  };

  void reset(SimTime from);

  UserGroup group_;
  RandomStream stream_;
  std::vector<Pending> heap_;
};

}  // namespace airsim
