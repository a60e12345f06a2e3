#pragma once

#include <cstdint>
#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "airsim/model.hpp"

namespace airsim {

/// Identifies a scheduled event. Sequences are issued in scheduling order and
/// break ties between events that fire at the same instant.
struct EventHandle {
  SimTime fire_at = 0.0;
  std::uint64_t sequence = 0;
};

/// Future-event list and clock of a discrete-event simulation.
///
/// Events fire in (fire_at, sequence) order, so simultaneous events fire in
/// the order they were scheduled. A single instance is not thread-safe.
template <class Payload>
class EventQueue {
 public:
  struct Event {
    SimTime fire_at;
    std::uint64_t sequence;
    Payload payload;
  };

  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }
  [[nodiscard]] std::uint64_t fired() const { return fired_; }

  /// Throws std::logic_error when `fire_at` lies before the current clock.
  EventHandle schedule(SimTime fire_at, Payload payload) {
    if (fire_at < now_) {
      throw std::logic_error("cannot schedule event at t=" + std::to_string(fire_at) +
                             " before clock t=" + std::to_string(now_));
    }
    const std::uint64_t seq = next_sequence_++;
    heap_.push_back(Event{fire_at, seq, std::move(payload)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    return {fire_at, seq};
  }

  EventHandle schedule_in(double delay, Payload payload) {
    return schedule(now_ + delay, std::move(payload));
  }

  /// Visits pending events in unspecified order.
  template <class Fn>
  void for_each_pending(Fn&& fn) const {
    for (const auto& e : heap_) fn(e);
  }

  /// Fires every event with fire_at <= end, in order, then sets the clock to
  /// `end`. `handler(const Event&)` may schedule further events.
  template <class Handler>
  void run_until(SimTime end, Handler&& handler) {
    if (end < now_) {
      throw std::logic_error("run_until: end t=" + std::to_string(end) +
                             " lies before clock t=" + std::to_string(now_));
    }
    while (!heap_.empty() && heap_.front().fire_at <= end) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      Event event = std::move(heap_.back());
      heap_.pop_back();
      now_ = event.fire_at;
      ++fired_;
      handler(event);
    }
    now_ = end;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::vector<Event> heap_;
  SimTime now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t fired_ = 0;
};

/// Seeded random stream. Draws depend only on (seed, stream_id); the
/// generator and the transforms used are fully specified, so sequences are
/// reproducible across standard libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Exponential draw with the given mean. Throws std::invalid_argument for
  /// a non-positive mean.
  double exponential(double mean);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
};

/// Free-function form of RandomStream::exponential.
inline double sample_exponential(RandomStream& stream, double mean) {
  return stream.exponential(mean);
}

}  // namespace airsim
