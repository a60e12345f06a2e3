// airsim: command-line front end for the air-computing disaster simulator.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "airsim/runner.hpp"
#include "airsim/workload.hpp"

namespace {

int cmd_validate(const std::string& scenario) {
  try {
    airsim::validate(airsim::cli::resolve_scenario(scenario));
  } catch (const airsim::ScenarioError& e) {
    std::cerr << "scenario '" << scenario << "' rejected:\n";
    for (const auto& p : e.problems()) std::cerr << "  - " << p << '\n';
    return 2;
  }
  std::cout << scenario << ": ok\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& baseline, const std::vector<std::string>& treatment,
                const std::vector<double>& phases, const std::string& out_path) {
  try {
    std::vector<airsim::TimeSeriesTable> b;
    std::vector<airsim::TimeSeriesTable> t;
    for (const auto& p : baseline) b.push_back(airsim::cli::load_time_series(p));
    for (const auto& p : treatment) t.push_back(airsim::cli::load_time_series(p));
    const auto report = airsim::cli::compare(b, t, phases);
    if (out_path.empty()) {
      airsim::cli::write_comparison(std::cout, report);
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "cannot write " << out_path << '\n';
        return 1;
      }
      airsim::cli::write_comparison(out, report);
    }
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Air-computing disaster-response simulator"};
  app.require_subcommand(1);

  airsim::cli::RunRequest req;
  std::string scenario_opt;
  std::string scenario_pos;
  std::string seeds = "1";
  auto* run = app.add_subcommand("run", "Run a scenario for one or more seeds");
  run->add_option("target", scenario_pos, "Scenario file or builtin name");
  run->add_option("--scenario", scenario_opt,
                  "Scenario file or builtin (disaster-baseline, disaster-uav)");
  run->add_option("--seed", seeds, "Seed list, e.g. 42 or 1,2,3 or 1-10");
  run->add_option("--out", req.out_dir, "Output directory");
  run->add_option("--window", req.window, "Metrics window width in seconds");
  run->add_option("--until", req.until, "Stop early at this simulation time");
  run->add_flag("--trace", req.trace, "Write one record per task");
  run->add_flag("--plot", req.plot, "Write an SVG plot per seed");
  run->add_option("--jobs", req.jobs, "Seeds simulated concurrently (0 = all cores)");

  std::string validate_target;
  auto* validate = app.add_subcommand("validate", "Check a scenario and list every problem");
  validate->add_option("scenario", validate_target, "Scenario file or builtin name")->required();

  std::string show_target;
  auto* show = app.add_subcommand("show", "Print a scenario (e.g. a builtin) as a scenario file");
  show->add_option("scenario", show_target, "Scenario file or builtin name")->required();

  std::vector<std::string> baseline;
  std::vector<std::string> treatment;
  std::vector<double> phases;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Compare per-phase success rates of two runs");
  compare->add_option("--baseline", baseline, "Baseline time-series CSV files")->required();
  compare->add_option("--treatment", treatment, "Treatment time-series CSV files")->required();
  compare->add_option("--phases", phases, "Phase boundaries in seconds")->delimiter(',');
  compare->add_option("--out", compare_out, "Write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    req.scenario = !scenario_opt.empty() ? scenario_opt : scenario_pos;
    if (req.scenario.empty()) {
      std::cerr << "run: a scenario is required\n";
      return 2;
    }
    try {
      req.seeds = airsim::cli::parse_seed_list(seeds);
    } catch (const std::exception& e) {
      std::cerr << "run: " << e.what() << '\n';
      return 2;
    }
    return airsim::cli::run(req, std::cout, std::cerr);
  }
  if (*validate) return cmd_validate(validate_target);
  if (*show) {
    try {
      std::cout << airsim::to_yaml(airsim::cli::resolve_scenario(show_target));
    } catch (const airsim::ScenarioError& e) {
      std::cerr << e.what() << '\n';
      return 2;
    }
    return 0;
  }
  return cmd_compare(baseline, treatment, phases, compare_out);
}
