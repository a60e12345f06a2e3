// Acceptance gate: every criterion at its stated tolerance, one line each.

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "airsim/model.hpp"
#include "airsim/simulation.hpp"
#include "oracles.hpp"

using namespace airsim;

namespace {

constexpr std::uint64_t kSeeds = 10;
const TownId kT1{1}, kT2{2}, kT3{3};

struct SeedRun {
  std::uint64_t seed = 0;
  RunResult result;
  std::string bytes;
  std::string rerun_bytes;
  std::optional<FleetAssignment> assignment_at_2500;
};

std::string serialize(const RunResult& r) {
  std::stringstream ss;
  write_time_series_csv(ss, r.series);
  write_summary(ss, r.summary);
  return ss.str();
}

SeedRun run_seed(const Scenario& s, std::uint64_t seed) {
  SimulationOptions o;
  o.seed = seed;
  SeedRun out;
  out.seed = seed;
  {
    Simulation sim(s, o);
    if (s.controller.enabled) {
      sim.run_until(2500.0);
      out.assignment_at_2500 = sim.controller()->assignment();
    }
    out.result = sim.finish();
  }
  out.bytes = serialize(out.result);
  out.rerun_bytes = serialize(run_scenario(s, o));
  return out;
}

std::vector<SeedRun> run_all(const Scenario& s) {
  std::vector<SeedRun> runs(kSeeds);
  std::vector<std::thread> pool;
  const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= runs.size()) return;
        i = next++;
      }
      runs[i] = run_seed(s, i + 1);
    }
  };
  for (unsigned j = 1; j < std::min<unsigned>(jobs, kSeeds); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return runs;
}

double mean_or(const std::vector<SuccessWindow>& s, double from, double to, double fallback) {
  return mean_rate(s, from, to).value_or(fallback);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int report(int n, const char* name, const Verdict& v, double seconds) {
  std::printf("criterion %d (%s): %s  %s  [%.1fs]\n", n, name, v.pass ? "PASS" : "FAIL",
              v.detail.c_str(), seconds);
  std::fflush(stdout);
  return v.pass ? 0 : 1;
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Verdict baseline_town1(const std::vector<SeedRun>& runs) {
  Verdict v;
  for (const auto& r : runs) {
    for (const auto& w : r.result.series.at(kT1)) {
      if (w.window_start < 1100.0) continue;
      if (w.rate() != std::optional<double>(0.0)) {
        v.fail("seed " + std::to_string(r.seed) + " window " + fmt(w.window_start) + " rate " +
               (w.rate() ? fmt(*w.rate()) : std::string("undefined")));
      }
    }
  }
  if (v.pass) v.detail = "Town-1 rate 0.0 in every window from 1100 s, all seeds";
  return v;
}

Verdict baseline_town2(const std::vector<SeedRun>& runs) {
  Verdict v;
  double worst = 0.0;
  for (const auto& r : runs) {
    const double m = mean_or(r.result.series.at(kT2), 2500.0, 4000.0, 1.0);
    worst = std::max(worst, m);
    if (m > 0.02) v.fail("seed " + std::to_string(r.seed) + " Town-2 mean " + fmt(m));
  }
  if (v.pass) v.detail = "max Town-2 mean over [2500,4000) = " + fmt(worst);
  return v;
}

Verdict baseline_town3(const std::vector<SeedRun>& runs) {
  Verdict v;
  std::size_t above = 0;
  std::size_t min_positive = 10;
  std::size_t max_positive = 0;
  std::size_t windows = 0;
  for (const auto& r : runs) {
    const auto& s3 = r.result.series.at(kT3);
    const double m3 = mean_or(s3, 2000.0, 4000.0, 0.0);
    const double m2 = mean_or(r.result.series.at(kT2), 2000.0, 4000.0, 0.0);
    if (m3 > m2) ++above;
    std::size_t positive = 0;
    windows = 0;
    for (const auto& w : s3) {
      if (w.window_start < 2000.0 || w.window_end > 3000.0) continue;
      ++windows;
      if (w.rate().value_or(0.0) > 0.0) ++positive;
    }
    min_positive = std::min(min_positive, positive);
    max_positive = std::max(max_positive, positive);
    if (!(m3 > m2) || 2 * positive < windows) v.pass = false;
  }
  v.detail = "Town-3 mean above Town-2 in " + std::to_string(above) + "/" +
             std::to_string(runs.size()) + " seeds; Town-3 rate > 0 in " +
             std::to_string(min_positive) + ".." + std::to_string(max_positive) + " of " +
             std::to_string(windows) + " windows of [2000,3000) (need >= half)";
  return v;
}

// Recovery after a phase change c: some window ending by c + 200 s has rate
// above 0.9, and every later window before the next change stays above 0.9.
bool recovers(const std::vector<SuccessWindow>& s, double change, double next_change,
              std::string& why) {
  bool back = false;
  for (const auto& w : s) {
    if (w.window_start < change || w.window_end > next_change) continue;
    const double r = w.rate().value_or(0.0);
    if (!back) {
      if (r > 0.9 && w.window_end <= change + 200.0) {
        back = true;
      } else if (w.window_end >= change + 200.0) {
        why = "no window above 0.9 by " + fmt(change + 200.0);
        return false;
      }
    } else if (r <= 0.9) {
      why = "dropped to " + fmt(r) + " at " + fmt(w.window_start);
      return false;
    }
  }
  if (!back) why = "no window above 0.9 after " + fmt(change);
  return back;
}

Verdict uav_recovery(const std::vector<SeedRun>& runs) {
  Verdict v;
  double worst = 1.0;
  for (const auto& r : runs) {
    for (TownId t : {kT1, kT2, kT3}) {
      const auto& s = r.result.series.at(t);
      const double m = mean_or(s, 2500.0, 4000.0, 0.0);
      worst = std::min(worst, m);
      const std::string who = "seed " + std::to_string(r.seed) + " Town-" + std::to_string(raw(t));
      if (m < 0.95) v.fail(who + " mean over [2500,4000) " + fmt(m));
      std::string why;
      if (!recovers(s, 1000.0, 2000.0, why)) v.fail(who + " after 1000 s: " + why);
      if (!recovers(s, 2000.0, 4000.0, why)) v.fail(who + " after 2000 s: " + why);
    }
  }
  if (v.pass) v.detail = "min town mean over [2500,4000) = " + fmt(worst) + ", recovered <= 200 s";
  return v;
}

Verdict fleet_arithmetic(const std::vector<SeedRun>& runs) {
  // Deficits from the calibration, through the independent ceil oracle.
  const std::map<std::uint32_t, std::int64_t> deficits{
      {1, static_cast<std::int64_t>(oracle::offered_load(2000, 90, 1.0))},
      {2, static_cast<std::int64_t>(oracle::offered_load(2000, 90, 1.0)) - 100'000},
      {3, static_cast<std::int64_t>(oracle::offered_load(1000, 90, 1.0) +
                                    oracle::offered_load(1000, 12, 1.0)) -
              100'000}};
  const auto want = oracle::greedy_counts(deficits, 50'000, 8);
  Verdict v;
  if (want != std::map<std::uint32_t, std::uint32_t>{{1, 4}, {2, 2}, {3, 1}}) {
    v.fail("oracle disagrees with the 4/2/1 split");
  }
  for (const auto& r : runs) {
    const auto& a = *r.assignment_at_2500;
    const bool ok = a.count(kT1) == 4 && a.count(kT2) == 2 && a.count(kT3) == 1 &&
                    a.unassigned.size() == 1 && a.assigned() == 7;
    if (!ok) {
      v.fail("seed " + std::to_string(r.seed) + " got " + std::to_string(a.count(kT1)) + "/" +
             std::to_string(a.count(kT2)) + "/" + std::to_string(a.count(kT3)) + " + " +
             std::to_string(a.unassigned.size()));
    }
  }
  if (v.pass) v.detail = "Town-1:4 Town-2:2 Town-3:1, 1 unassigned, all seeds";
  return v;
}

Scenario md1_scenario() {
  Scenario s;
  s.name = "md1";
  s.duration = 400.0;
  s.towns.push_back({kT1, "Town-1", {0, 0, 0}});
  s.edge_servers.push_back({NodeId{1}, kT1, Capacity{100'000.0}, 0.001});
  UserGroup g;
  g.id = GroupId{1};
  g.town = kT1;
  g.user_count = 1000;
  g.profile = {CpuUnits{90.0}, 1.0, 1.8};  // 50K units/s offered: rho 0.5
  s.groups.push_back(g);
  return s;
}

Verdict queueing_oracle(const RunResult& r) {
  Verdict v;
  const auto& st = r.nodes.at(0).stats;
  const double service = 90.0 / 100'000.0;
  const double served = static_cast<double>(st.served);
  const double rho = st.work_done / 100'000.0 / r.summary.horizon;
  const double wait = st.total_wait / served;
  const double want_wait = oracle::md1_wait(0.5, service);
  const double l = st.area_in_system / r.summary.horizon;
  const double lw = served / r.summary.horizon * (st.total_sojourn / served);
  if (st.served < 100'000) v.fail("only " + std::to_string(st.served) + " tasks");
  if (std::abs(wait - want_wait) > 0.10 * want_wait) {
    v.fail("mean wait " + fmt(wait * 1e6) + " us vs " + fmt(want_wait * 1e6) + " us");
  }
  if (std::abs(l - lw) > 0.05 * lw) v.fail("L " + fmt(l) + " vs lambda*W " + fmt(lw));
  if (v.pass) {
    v.detail = std::to_string(st.served) + " tasks, rho " + fmt(rho) + ", wait " +
               fmt(wait * 1e6) + " us vs " + fmt(want_wait * 1e6) + " us, L " + fmt(l) +
               " vs lambda*W " + fmt(lw);
  }
  return v;
}

Verdict conservation(const std::vector<const std::vector<SeedRun>*>& sets) {
  Verdict v;
  std::size_t runs = 0;
  for (const auto* set : sets) {
    for (const auto& r : *set) {
      ++runs;
      for (const auto& [town, t] : r.result.summary.towns) {
        if (!t.conserved()) {
          v.fail(r.result.summary.scenario + " seed " + std::to_string(r.seed) + " Town-" +
                 std::to_string(raw(town)) + " not conserved");
        }
      }
      if (r.bytes != r.rerun_bytes) {
        v.fail(r.result.summary.scenario + " seed " + std::to_string(r.seed) +
               " rerun differs");
      }
    }
  }
  if (v.pass) v.detail = std::to_string(runs) + " runs conserved and byte-identical on rerun";
  return v;
}

Verdict delay_ranges() {
  Verdict v;
  const Range lap = layer_delay_range(AirLayer::Lap);
  const Range hap = layer_delay_range(AirLayer::Hap);
  const Range leo = layer_delay_range(AirLayer::Leo);
  if (!(lap == Range{0.0, 30e-6} && hap == Range{30e-6, 100e-6} && leo == Range{0.5e-3, 7e-3})) {
    v.fail("published ranges differ");
  }
  // Boundary altitudes in meters; the ground itself is approached from above.
  const std::vector<std::pair<AirLayer, double>> checks{
      {AirLayer::Lap, 1e-3},   {AirLayer::Lap, 10e3},   {AirLayer::Hap, 10e3},
      {AirLayer::Hap, 30e3},   {AirLayer::Leo, 160e3},  {AirLayer::Leo, 2000e3}};
  for (const auto& [layer, h] : checks) {
    const double d = propagation_delay(h);
    if (std::abs(d - oracle::light_time(h)) > 1e-18) v.fail("delay off the h/c oracle");
    if (!layer_delay_range(layer).widened(0.15).contains(d)) {
      v.fail(std::string(to_string(layer)) + " at " + fmt(h) + " m: " + fmt(d * 1e6) + " us");
    }
  }
  if (v.pass) v.detail = "exact triples; 6 boundary altitudes inside widened ranges";
  return v;
}

}  // namespace

int main() {
  int failures = 0;

  auto t0 = Clock::now();
  const auto baseline = run_all(build_disaster_scenario(false));
  const double baseline_time = since(t0);
  failures += report(1, "baseline Town-1 collapse", baseline_town1(baseline), baseline_time);
  failures += report(2, "baseline Town-2 collapse", baseline_town2(baseline), 0.0);
  failures += report(3, "baseline Town-3 gentler decline", baseline_town3(baseline), 0.0);

  t0 = Clock::now();
  const auto uav = run_all(build_disaster_scenario(true));
  failures += report(4, "UAV-assisted recovery", uav_recovery(uav), since(t0));
  failures += report(5, "fleet arithmetic", fleet_arithmetic(uav), 0.0);

  t0 = Clock::now();
  std::vector<SeedRun> md1;
  md1.push_back(run_seed(md1_scenario(), 1));
  failures += report(6, "M/D/1 queueing oracle", queueing_oracle(md1.front().result), since(t0));

  t0 = Clock::now();
  failures += report(7, "conservation and determinism", conservation({&baseline, &uav, &md1}),
                     since(t0));

  t0 = Clock::now();
  failures += report(8, "propagation-delay ranges", delay_ranges(), since(t0));

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
