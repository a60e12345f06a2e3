#include "airsim/runner.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace airsim::cli {
namespace {

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad seed '" + std::string(s) + "'");
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void check_same_schema(const TimeSeriesTable& a, const TimeSeriesTable& b) {
  if (a.size() != b.size()) throw std::invalid_argument("time series cover different towns");
  for (const auto& [town, series] : a) {
    auto it = b.find(town);
    if (it == b.end()) {
      throw std::invalid_argument("town " + std::to_string(raw(town)) + " missing in one input");
    }
    const auto& other = it->second;
    if (series.size() != other.size()) {
      throw std::invalid_argument("town " + std::to_string(raw(town)) +
                                  ": different number of windows");
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].window_start != other[i].window_start ||
          series[i].window_end != other[i].window_end) {
        throw std::invalid_argument("window widths differ between inputs");
      }
    }
  }
}

std::optional<double> mean_over(const std::vector<TimeSeriesTable>& runs, TownId town,
                                SimTime from, SimTime to) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& run : runs) {
    if (auto m = mean_rate(run.at(town), from, to)) {
      sum += *m;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

Scenario resolve_scenario(const std::string& name_or_path) {
  if (name_or_path == kBuiltinBaseline) return build_disaster_scenario(false);
  if (name_or_path == kBuiltinUav) return build_disaster_scenario(true);
  return load_scenario(name_or_path);
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      seeds.push_back(parse_u64(item));
      continue;
    }
    const auto lo = parse_u64(item.substr(0, dash));
    const auto hi = parse_u64(item.substr(dash + 1));
    if (hi < lo) throw std::invalid_argument("bad seed range '" + std::string(item) + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  return seeds;
}

SeedFiles output_files(const RunRequest& request, std::uint64_t seed) {
  const auto tag = std::to_string(seed);
  SeedFiles f;
  f.time_series = request.out_dir / ("ts_" + tag + ".csv");
  f.summary = request.out_dir / ("summary_" + tag + ".txt");
  if (request.trace) f.trace = request.out_dir / ("trace_" + tag + ".csv");
  if (request.plot) f.plot = request.out_dir / ("plot_" + tag + ".svg");
  return f;
}

RunResult run_seed(const Scenario& scenario, const RunRequest& request, std::uint64_t seed) {
  const SeedFiles files = output_files(request, seed);
  std::optional<std::ofstream> trace;
  if (files.trace) trace.emplace(open_out(*files.trace));

  SimulationOptions opts;
  opts.seed = seed;
  opts.window = request.window;
  opts.until = request.until;
  opts.trace = trace ? &*trace : nullptr;
  RunResult result = run_scenario(scenario, opts);

  {
    auto out = open_out(files.time_series);
    write_time_series_csv(out, result.series);
  }
  {
    auto out = open_out(files.summary);
    write_summary(out, result.summary);
  }
  if (files.plot) {
    auto out = open_out(*files.plot);
    write_svg_plot(out, result.series, scenario.name + " (seed " + std::to_string(seed) + ")");
  }
  return result;
}

int run(const RunRequest& request, std::ostream& log, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = resolve_scenario(request.scenario);
    validate(scenario);
  } catch (const ScenarioError& e) {
    err << "scenario '" << request.scenario << "' rejected:\n";
    for (const auto& p : e.problems()) err << "  - " << p << '\n';
    return 2;
  }
  if (request.seeds.empty()) {
    err << "at least one seed is required\n";
    return 2;
  }
  std::error_code ec;
  std::filesystem::create_directories(request.out_dir, ec);
  if (ec) {
    err << "cannot create output directory " << request.out_dir << ": " << ec.message() << '\n';
    return 1;
  }

  // Seeds are share-nothing; results are reported in request order.
  std::vector<std::optional<RunSummary>> summaries(request.seeds.size());
  std::vector<std::string> failures(request.seeds.size());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = 0;
      {
        std::lock_guard lock(mu);
        if (next >= request.seeds.size()) return;
        i = next++;
      }
      try {
        summaries[i] = run_seed(scenario, request, request.seeds[i]).summary;
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  unsigned jobs = request.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                    : request.jobs;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(request.seeds.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = 0;
  for (std::size_t i = 0; i < request.seeds.size(); ++i) {
    const auto seed = request.seeds[i];
    if (!summaries[i]) {
      err << "seed " << seed << ": " << failures[i] << '\n';
      status = 1;
      continue;
    }
    const auto files = output_files(request, seed);
    log << "seed " << seed << ": success rate " << summaries[i]->success_rate << " -> "
        << files.time_series.string() << ", " << files.summary.string() << '\n';
  }
  return status;
}

std::optional<double> PhaseRow::delta() const {
  if (!baseline || !treatment) return std::nullopt;
  return *treatment - *baseline;
}

ComparisonReport compare(const std::vector<TimeSeriesTable>& baseline,
                         const std::vector<TimeSeriesTable>& treatment,
                         std::vector<double> bounds) {
  if (baseline.empty() || treatment.empty()) {
    throw std::invalid_argument("compare needs at least one run on each side");
  }
  const TimeSeriesTable& ref = baseline.front();
  for (const auto& t : baseline) check_same_schema(ref, t);
  for (const auto& t : treatment) check_same_schema(ref, t);

  double end = 0.0;
  for (const auto& [town, series] : ref) {
    if (!series.empty()) end = std::max(end, series.back().window_end);
  }
  if (bounds.empty()) {
    bounds = {0.0};
    for (double b : {1000.0, 2000.0}) {
      if (b < end) bounds.push_back(b);
    }
    bounds.push_back(end);
  }
  if (bounds.size() < 2 || !std::is_sorted(bounds.begin(), bounds.end())) {
    throw std::invalid_argument("phase bounds must be ascending with at least two entries");
  }

  ComparisonReport report;
  for (const auto& [town, series] : ref) {
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
      PhaseRow row{town, bounds[i], bounds[i + 1], std::nullopt, std::nullopt};
      row.baseline = mean_over(baseline, town, row.from, row.to);
      row.treatment = mean_over(treatment, town, row.from, row.to);
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_comparison(std::ostream& out, const ComparisonReport& report) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return std::string(buf);
  };
  out << "town,phase_start,phase_end,baseline_mean,treatment_mean,delta\n";
  for (const auto& r : report.rows) {
    out << raw(r.town) << ',' << r.from << ',' << r.to << ',' << cell(r.baseline) << ','
        << cell(r.treatment) << ',' << cell(r.delta()) << '\n';
  }
}

TimeSeriesTable load_time_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_time_series_csv(in);
}

}  // namespace airsim::cli
