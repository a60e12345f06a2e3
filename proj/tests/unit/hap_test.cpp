#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "airsim/engine.hpp"
#include "airsim/hap.hpp"
#include "oracles.hpp"

using namespace airsim;

namespace {

std::vector<NodeId> fleet_of(std::uint32_t n) {
  std::vector<NodeId> f;
  for (std::uint32_t i = 0; i < n; ++i) f.push_back(NodeId{101 + i});
  return f;
}

std::vector<DemandEstimate> deficits(std::initializer_list<double> d) {
  std::vector<DemandEstimate> out;
  std::uint32_t town = 1;
  for (double x : d) out.push_back(estimate_demand(TownId{town++}, x, 0.0, 1.0));
  return out;
}

// Town-1 lost its edge; Town-2 keeps 100K; Town-3 keeps 100K.
std::vector<DemandEstimate> after_doubling() {
  return {
      estimate_demand(TownId{1}, oracle::offered_load(2000, 90, 1.0), 0.0, 1.0),
      estimate_demand(TownId{2}, oracle::offered_load(2000, 90, 1.0), 100'000.0, 1.0),
      estimate_demand(TownId{3},
                      oracle::offered_load(1000, 90, 1.0) + oracle::offered_load(1000, 12, 1.0),
                      100'000.0, 1.0),
  };
}

}  // namespace

TEST(EstimateDemand, DisasterPhaseThree) {
  const auto e = after_doubling();
  EXPECT_DOUBLE_EQ(e[0].deficit, 180'000.0);
  EXPECT_DOUBLE_EQ(e[1].deficit, 80'000.0);
  EXPECT_DOUBLE_EQ(e[2].deficit, 2'000.0);
  EXPECT_DOUBLE_EQ(e[2].offered_load, 102'000.0);
}

TEST(EstimateDemand, RhoTargetScalesRequirement) {
  EXPECT_DOUBLE_EQ(estimate_demand(TownId{1}, 90'000.0, 100'000.0, 0.5).deficit, 80'000.0);
  EXPECT_DOUBLE_EQ(estimate_demand(TownId{1}, 90'000.0, 100'000.0, 1.0).deficit, 0.0);
  EXPECT_THROW(estimate_demand(TownId{1}, 1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(estimate_demand(TownId{1}, 1.0, 1.0, 1.5), std::invalid_argument);
}

TEST(UavNeed, CeilArithmetic) {
  EXPECT_EQ(uav_need(180'000.0, 50'000.0), 4u);
  EXPECT_EQ(uav_need(100'000.0, 50'000.0), 2u);
  EXPECT_EQ(uav_need(2'000.0, 50'000.0), 1u);
  EXPECT_EQ(uav_need(0.0, 50'000.0), 0u);
  for (std::int64_t d = 0; d <= 400'000; d += 1'000) {
    EXPECT_EQ(uav_need(static_cast<double>(d), 50'000.0), oracle::uav_need(d, 50'000)) << d;
  }
}

TEST(PlanAssignment, DisasterSplit) {
  const auto e = after_doubling();
  const auto plan = plan_assignment(e, fleet_of(8), 50'000.0);
  EXPECT_EQ(plan.count(TownId{1}), 4u);
  EXPECT_EQ(plan.count(TownId{2}), 2u);
  EXPECT_EQ(plan.count(TownId{3}), 1u);
  EXPECT_EQ(plan.unassigned.size(), 1u);
}

TEST(PlanAssignment, NoDeficitLeavesFleetIdle) {
  const auto plan = plan_assignment(deficits({0, 0, 0}), fleet_of(8), 50'000.0);
  EXPECT_EQ(plan.assigned(), 0u);
  EXPECT_EQ(plan.unassigned.size(), 8u);
}

TEST(PlanAssignment, FleetCapped) {
  const auto plan = plan_assignment(deficits({500'000}), fleet_of(8), 50'000.0);
  EXPECT_EQ(plan.count(TownId{1}), 8u);
  EXPECT_TRUE(plan.unassigned.empty());
}

TEST(PlanAssignment, KeepsCurrentPlacement) {
  const auto e = after_doubling();
  FleetAssignment current;
  current.towns[TownId{2}] = {NodeId{108}, NodeId{107}};
  current.towns[TownId{1}] = {NodeId{101}};
  const auto plan = plan_assignment(e, fleet_of(8), 50'000.0, current);
  EXPECT_EQ(plan.town_of(NodeId{108}), TownId{2});
  EXPECT_EQ(plan.town_of(NodeId{107}), TownId{2});
  EXPECT_EQ(plan.town_of(NodeId{101}), TownId{1});
  EXPECT_EQ(plan.count(TownId{1}), 4u);
}

TEST(PlanAssignmentProperty, FeasibleAndGreedyDominant) {
  RandomStream rng(23, 0);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::uint32_t towns = 1 + static_cast<std::uint32_t>(rng.uniform() * 5);
    const std::uint32_t fleet = static_cast<std::uint32_t>(rng.uniform() * 12);
    std::vector<DemandEstimate> est;
    std::map<std::uint32_t, std::int64_t> d;
    for (std::uint32_t t = 1; t <= towns; ++t) {
      const auto deficit = static_cast<std::int64_t>(rng.uniform() * 8) * 25'000;
      d[t] = deficit;
      est.push_back({TownId{t}, 0.0, 0.0, static_cast<double>(deficit)});
    }
    const auto plan = plan_assignment(est, fleet_of(fleet), 50'000.0);

    std::set<NodeId> seen;
    for (const auto& [town, ids] : plan.towns) {
      for (NodeId id : ids) ASSERT_TRUE(seen.insert(id).second) << "double assignment";
    }
    for (NodeId id : plan.unassigned) ASSERT_TRUE(seen.insert(id).second);
    ASSERT_EQ(seen.size(), fleet);
    ASSERT_LE(plan.assigned(), fleet);

    const auto expected = oracle::greedy_counts(d, 50'000, fleet);
    for (std::uint32_t t = 1; t <= towns; ++t) {
      const auto want = expected.contains(t) ? expected.at(t) : 0u;
      ASSERT_EQ(plan.count(TownId{t}), want) << "town " << t;
      if (!plan.unassigned.empty()) {
        ASSERT_GE(plan.count(TownId{t}), oracle::uav_need(d[t], 50'000));
      }
    }
  }
}

TEST(HapController, FirstTickLaunchesTowardLargestDeficit) {
  HapController hap(ControllerConfig{}, 50'000.0);
  const auto fleet = fleet_of(8);
  const auto cmds = hap.tick(deficits({90'000, 0, 0}), fleet);
  ASSERT_EQ(cmds.size(), 2u);
  EXPECT_EQ(cmds[0], (DispatchCommand{NodeId{101}, TownId{1}}));
  EXPECT_EQ(cmds[1], (DispatchCommand{NodeId{102}, TownId{1}}));
}

TEST(HapController, UnchangedEstimatesIssueNoCommands) {
  HapController hap(ControllerConfig{}, 50'000.0);
  const auto fleet = fleet_of(8);
  EXPECT_FALSE(hap.tick(after_doubling(), fleet).empty());
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(hap.tick(after_doubling(), fleet).empty());
  EXPECT_EQ(hap.ticks(), 6u);
}

TEST(HapController, RebalancesAfterDoubling) {
  HapController hap(ControllerConfig{}, 50'000.0);
  const auto fleet = fleet_of(8);
  hap.tick({estimate_demand(TownId{1}, 90'000.0, 0.0, 1.0),
            estimate_demand(TownId{2}, 90'000.0, 100'000.0, 1.0),
            estimate_demand(TownId{3}, 90'000.0, 100'000.0, 1.0)},
           fleet);
  EXPECT_EQ(hap.assignment().count(TownId{1}), 2u);
  const auto cmds = hap.tick(after_doubling(), fleet);
  EXPECT_EQ(cmds.size(), 5u);
  EXPECT_EQ(hap.assignment().count(TownId{1}), 4u);
  EXPECT_EQ(hap.assignment().count(TownId{2}), 2u);
  EXPECT_EQ(hap.assignment().count(TownId{3}), 1u);
  EXPECT_EQ(hap.assignment().town_of(NodeId{101}), TownId{1});
}

TEST(HapController, ReleasedUavsReturnToBase) {
  HapController hap(ControllerConfig{}, 50'000.0);
  const auto fleet = fleet_of(4);
  hap.tick(deficits({100'000}), fleet);
  const auto cmds = hap.tick(deficits({0}), fleet);
  ASSERT_EQ(cmds.size(), 2u);
  EXPECT_FALSE(cmds[0].town);
}

TEST(HapControllerProperty, ConstantDemandStabilises) {
  RandomStream rng(31, 0);
  for (int trial = 0; trial < 500; ++trial) {
    HapController hap(ControllerConfig{}, 50'000.0);
    std::vector<DemandEstimate> est;
    for (std::uint32_t t = 1; t <= 3; ++t) {
      est.push_back(estimate_demand(TownId{t}, rng.uniform() * 300'000.0, 0.0, 1.0));
    }
    const auto fleet = fleet_of(static_cast<std::uint32_t>(rng.uniform() * 10));
    hap.tick(est, fleet);
    for (int i = 0; i < 3; ++i) ASSERT_TRUE(hap.tick(est, fleet).empty());
  }
}

TEST(ArrivalMeter, SlidingWindowRate) {
  ArrivalMeter m(10.0);
  for (int i = 0; i < 50; ++i) m.record(i * 0.1 + 0.05, 90.0);
  EXPECT_NEAR(m.rate(5.0), 900.0, 1e-9);
  for (int i = 50; i < 100; ++i) m.record(i * 0.1 + 0.05, 90.0);
  EXPECT_NEAR(m.rate(10.0), 900.0, 1e-9);
  EXPECT_NEAR(m.rate(15.0), 450.0, 1e-9);
  EXPECT_EQ(m.rate(100.0), 0.0);
}
