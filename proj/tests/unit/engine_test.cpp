#include <gtest/gtest.h>

#include <limits>
#include <string>
#include <vector>

#include "airsim/engine.hpp"

using namespace airsim;

namespace {
using Queue = EventQueue<std::string>;
}

TEST(EventQueue, FiresAtScheduledTime) {
  Queue q;
  q.run_until(3.0, [](const auto&) {});
  q.schedule(5.0, "a");
  double seen = -1.0;
  q.run_until(10.0, [&](const Queue::Event& e) { seen = e.fire_at; });
  EXPECT_EQ(seen, 5.0);
  EXPECT_EQ(q.now(), 10.0);
}

TEST(EventQueue, TiesFireInSchedulingOrder) {
  Queue q;
  q.schedule(5.0, "A");
  q.schedule(5.0, "B");
  q.schedule(4.0, "first");
  std::vector<std::string> order;
  q.run_until(5.0, [&](const Queue::Event& e) { order.push_back(e.payload); });
  EXPECT_EQ(order, (std::vector<std::string>{"first", "A", "B"}));
}

TEST(EventQueue, PastSchedulingIsAnError) {
  Queue q;
  q.run_until(3.0, [](const auto&) {});
  EXPECT_THROW(q.schedule(2.0, "late"), std::logic_error);
  EXPECT_NO_THROW(q.schedule(3.0, "now"));
}

TEST(EventQueue, EmptyRunAdvancesClock) {
  Queue q;
  q.run_until(4000.0, [](const auto&) { FAIL(); });
  EXPECT_EQ(q.now(), 4000.0);
  EXPECT_EQ(q.fired(), 0u);
}

TEST(EventQueue, EventReadsExactClock) {
  Queue q;
  q.schedule(1000.0, "quake");
  double clock = 0.0;
  q.run_until(4000.0, [&](const auto&) { clock = q.now(); });
  EXPECT_EQ(clock, 1000.0);
}

TEST(EventQueue, EndBoundaryIsInclusiveOnly) {
  Queue q;
  q.schedule(999.999, "before");
  q.schedule(1000.001, "after");
  std::vector<std::string> fired;
  q.run_until(1000.0, [&](const Queue::Event& e) { fired.push_back(e.payload); });
  EXPECT_EQ(fired, std::vector<std::string>{"before"});
  EXPECT_EQ(q.size(), 1u);
  EXPECT_THROW(q.run_until(999.0, [](const auto&) {}), std::logic_error);
}

TEST(EventQueue, ClockIsMonotoneUnderRandomScheduling) {
  EventQueue<int> q;
  RandomStream rng(3, 0);
  for (int i = 0; i < 200; ++i) q.schedule(rng.uniform() * 100.0, i);
  double last = -1.0;
  int fired = 0;
  q.run_until(1000.0, [&](const EventQueue<int>::Event& e) {
    EXPECT_GE(q.now(), last);
    last = q.now();
    if (++fired < 2000) q.schedule_in(rng.exponential(1.0), e.payload);
  });
  EXPECT_GE(fired, 2000);
}

TEST(RandomStream, ExponentialMeanWithinThreePercent) {
  for (double mean : {3.33, 1.0}) {
    RandomStream rng(42, 1);
    double sum = 0.0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) sum += sample_exponential(rng, mean);
    EXPECT_NEAR(sum / n, mean, 0.03 * mean);
  }
}

TEST(RandomStream, SameSeedAndStreamRepeat) {
  RandomStream a(9, 4);
  RandomStream b(9, 4);
  RandomStream other(9, 5);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.exponential(2.0);
    EXPECT_EQ(x, b.exponential(2.0));
    differs |= x != other.exponential(2.0);
  }
  EXPECT_TRUE(differs);
}

TEST(RandomStream, UniformStaysInUnitInterval) {
  RandomStream rng(1, 1);
  for (int i = 0; i < 100'000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, RejectsNonPositiveMean) {
  RandomStream rng(1, 1);
  EXPECT_THROW(rng.exponential(0.0), std::invalid_argument);
}
