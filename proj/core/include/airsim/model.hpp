#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>

namespace airsim {

/// Simulation time in seconds since the start of the run.
using SimTime = double;

/// A real-valued quantity tagged with its unit so that work and rates cannot
/// be mixed up by accident.
template <class Tag>
class Quantity {
 public:
  constexpr Quantity() = default;
  constexpr explicit Quantity(double value) : value_(value) {}

  [[nodiscard]] constexpr double value() const { return value_; }

  constexpr auto operator<=>(const Quantity&) const = default;

  constexpr Quantity& operator+=(Quantity other) {
    value_ += other.value_;
    return *this;
  }
  constexpr Quantity& operator-=(Quantity other) {
    value_ -= other.value_;
    return *this;
  }
  friend constexpr Quantity operator+(Quantity a, Quantity b) { return a += b; }
  friend constexpr Quantity operator-(Quantity a, Quantity b) { return a -= b; }
  friend constexpr Quantity operator*(Quantity a, double k) { return Quantity(a.value_ * k); }
  friend constexpr Quantity operator*(double k, Quantity a) { return Quantity(a.value_ * k); }

 private:
  double value_ = 0.0;
};

/// Abstract units of computational work.
using CpuUnits = Quantity<struct CpuUnitsTag>;
/// Processing rate in CPU units per second.
using Capacity = Quantity<struct CapacityTag>;

/// Seconds needed to process `work` at `rate`.
constexpr double operator/(CpuUnits work, Capacity rate) { return work.value() / rate.value(); }
/// Work processed at `rate` during `seconds`.
constexpr CpuUnits work_in(Capacity rate, double seconds) {
  return CpuUnits(rate.value() * seconds);
}

enum class TownId : std::uint32_t {};
enum class GroupId : std::uint32_t {};
enum class NodeId : std::uint32_t {};

template <class Id>
constexpr std::uint32_t raw(Id id) {
  return static_cast<std::uint32_t>(id);
}

struct GeoPosition {
  double x = 0.0;         // meters
  double y = 0.0;         // meters
  double altitude = 0.0;  // meters, >= 0

  friend bool operator==(const GeoPosition&, const GeoPosition&) = default;
};

/// Straight-line 3D distance in meters.
double distance(const GeoPosition& a, const GeoPosition& b);

enum class AirLayer { Lap, Hap, Leo };

struct Range {
  double min = 0.0;
  double max = 0.0;

  [[nodiscard]] bool contains(double v) const { return v >= min && v <= max; }
  /// Range stretched by `fraction` of each bound (min shrinks, max grows).
  [[nodiscard]] Range widened(double fraction) const {
    return {min * (1.0 - fraction), max * (1.0 + fraction)};
  }
  friend bool operator==(const Range&, const Range&) = default;
};

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// One-way light travel time from the ground to `altitude_meters`.
/// Throws std::invalid_argument for non-positive altitudes.
double propagation_delay(double altitude_meters);

/// Operating altitude band of a layer, in kilometers.
Range layer_altitude_range_km(AirLayer layer);

/// Published propagation-delay band of a layer, in seconds. These are rounded
/// reference values; propagation_delay() is the physical function.
Range layer_delay_range(AirLayer layer);

std::string_view to_string(AirLayer layer);

struct ApplicationProfile {
  CpuUnits task_size{90.0};
  double tolerable_delay = 1.0;    // seconds
  double mean_interarrival = 1.0;  // seconds, per user

  /// True when every field is strictly positive.
  [[nodiscard]] bool valid() const;
  friend bool operator==(const ApplicationProfile&, const ApplicationProfile&) = default;
};

enum class TaskFate : std::uint8_t {
  Pending,
  Succeeded,
  FailedDeadline,
  FailedNoTarget,
  FailedNodeDestroyed,
};

std::string_view to_string(TaskFate fate);

struct Task {
  std::uint64_t id = 0;
  GroupId group{};
  TownId town{};
  SimTime created_at = 0.0;
  CpuUnits size{};
  double tolerable_delay = 0.0;
  TaskFate fate = TaskFate::Pending;
  std::optional<NodeId> node;
  /// When the result reached the user; only set for tasks that were served.
  std::optional<SimTime> completed_at;
  /// When the fate became terminal (result return, rejection or node loss).
  SimTime resolved_at = 0.0;

  [[nodiscard]] bool terminal() const { return fate != TaskFate::Pending; }

  /// Result returned to the user at `at`; fate follows from the deadline.
  /// Throws std::logic_error if the task already has a terminal fate.
  TaskFate complete(SimTime at);
  /// Terminal failure without a returned result.
  void fail(TaskFate fate, SimTime at);
};

}  // namespace airsim
