#include "airsim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace airsim {

double distance(const GeoPosition& a, const GeoPosition& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.altitude - b.altitude;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double propagation_delay(double altitude_meters) {
  if (!(altitude_meters > 0.0)) {
    throw std::invalid_argument("propagation_delay: altitude must be positive, got " +
                                std::to_string(altitude_meters));
  }
  return altitude_meters / kSpeedOfLight;
}

Range layer_altitude_range_km(AirLayer layer) {
  switch (layer) {
    case AirLayer::Lap:
      return {0.0, 10.0};
    case AirLayer::Hap:
      return {10.0, 30.0};
    case AirLayer::Leo:
      return {160.0, 2000.0};
  }
  throw std::invalid_argument("unknown air layer");
}

Range layer_delay_range(AirLayer layer) {
  switch (layer) {
    case AirLayer::Lap:
      return {0.0, 30e-6};
    case AirLayer::Hap:
      return {30e-6, 100e-6};
    case AirLayer::Leo:
      return {0.5e-3, 7e-3};
  }
  throw std::invalid_argument("unknown air layer");
}

std::string_view to_string(AirLayer layer) {
  switch (layer) {
    case AirLayer::Lap:
      return "LAP";
    case AirLayer::Hap:
      return "HAP";
    case AirLayer::Leo:
      return "LEO";
  }
  return "?";
}

bool ApplicationProfile::valid() const {
  return task_size.value() > 0.0 && tolerable_delay > 0.0 && mean_interarrival > 0.0;
}

std::string_view to_string(TaskFate fate) {
  switch (fate) {
    case TaskFate::Pending:
      return "pending";
    case TaskFate::Succeeded:
      return "succeeded";
    case TaskFate::FailedDeadline:
      return "failed_deadline";
    case TaskFate::FailedNoTarget:
      return "failed_no_target";
    case TaskFate::FailedNodeDestroyed:
      return "failed_node_destroyed";
  }
  return "?";
}

TaskFate Task::complete(SimTime at) {
  if (terminal()) {
    throw std::logic_error("task " + std::to_string(id) + " already resolved");
  }
  if (at < created_at) {
    throw std::logic_error("task " + std::to_string(id) + " completed before creation");
  }
  completed_at = at;
  resolved_at = at;
  fate = (at - created_at <= tolerable_delay) ? TaskFate::Succeeded : TaskFate::FailedDeadline;
  return fate;
}

void Task::fail(TaskFate new_fate, SimTime at) {
  if (terminal()) {
    throw std::logic_error("task " + std::to_string(id) + " already resolved");
  }
  if (new_fate == TaskFate::Pending || new_fate == TaskFate::Succeeded ||
      new_fate == TaskFate::FailedDeadline) {
    throw std::logic_error("fail() needs a failure fate that does not involve a result");
  }
  fate = new_fate;
  resolved_at = at;
}

}  // namespace airsim
