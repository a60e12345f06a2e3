#include <benchmark/benchmark.h>

#include <vector>

#include "airsim/engine.hpp"
#include "airsim/offload.hpp"
#include "airsim/simulation.hpp"

using namespace airsim;

static void BM_EventQueueHold(benchmark::State& state) {
  EventQueue<std::uint64_t> q;
  RandomStream rng(1, 0);
  for (std::int64_t i = 0; i < state.range(0); ++i) q.schedule(rng.uniform(), i);
  for (auto _ : state) {
    q.run_until(q.now() + 1.0, [&](const EventQueue<std::uint64_t>::Event& e) {
      q.schedule_in(rng.exponential(1.0) + 1.0, e.payload);
    });
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(q.fired()));
}
BENCHMARK(BM_EventQueueHold)->Arg(16)->Arg(1024)->Arg(65536);

static void BM_ChooseMinDelay(benchmark::State& state) {
  std::vector<NodeEstimate> c;
  RandomStream rng(2, 0);
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    c.push_back({NodeId{static_cast<std::uint32_t>(100 + i)}, NodeKind::Uav, rng.uniform()});
  }
  for (auto _ : state) benchmark::DoNotOptimize(choose_min_delay(c));
}
BENCHMARK(BM_ChooseMinDelay)->Arg(3)->Arg(11);

static void BM_DisasterRun(benchmark::State& state) {
  const Scenario s = build_disaster_scenario(state.range(0) != 0);
  SimulationOptions o;
  o.until = 200.0;
  std::uint64_t events = 0;
  for (auto _ : state) events += run_scenario(s, o).events_fired;
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_DisasterRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
