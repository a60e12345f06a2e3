#include "airsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace airsim {
namespace {

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf, end};
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("time series line " + std::to_string(line) + ": bad number '" + s +
                             "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("time series line " + std::to_string(line) + ": bad count '" + s +
                             "'");
  }
  return v;
}

}  // namespace

std::optional<double> SuccessWindow::rate() const {
  if (completed == 0) return std::nullopt;
  return static_cast<double>(succeeded) / static_cast<double>(completed);
}

MetricsCollector::MetricsCollector(std::vector<TownId> towns, SimTime horizon, double width)
    : towns_(std::move(towns)), horizon_(horizon), width_(width) {
  if (!(width > 0.0)) throw std::invalid_argument("window width must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  windows_ = static_cast<std::size_t>(std::ceil(horizon / width));
  totals_.resize(towns_.size());
  completed_.assign(towns_.size(), std::vector<std::uint64_t>(windows_, 0));
  succeeded_.assign(towns_.size(), std::vector<std::uint64_t>(windows_, 0));
}

std::size_t MetricsCollector::town_index(TownId town) const {
  auto it = std::find(towns_.begin(), towns_.end(), town);
  if (it == towns_.end()) {
    throw std::out_of_range("unknown town " + std::to_string(raw(town)));
  }
  return static_cast<std::size_t>(it - towns_.begin());
}

void MetricsCollector::note_generated(const Task& task) {
  ++totals_[town_index(task.town)].generated;
}

void MetricsCollector::record(const Task& task) {
  if (!task.terminal()) {
    throw std::logic_error("task " + std::to_string(task.id) + " is still pending");
  }
  if (task.id >= recorded_.size()) recorded_.resize(std::max<std::size_t>(task.id + 1, recorded_.size() * 2));
  if (recorded_[task.id]) {
    throw std::logic_error("task " + std::to_string(task.id) + " recorded twice");
  }
  recorded_[task.id] = true;

  const std::size_t t = town_index(task.town);
  auto& tot = totals_[t];
  switch (task.fate) {
    case TaskFate::Succeeded:
      ++tot.succeeded;
      break;
    case TaskFate::FailedDeadline:
      ++tot.failed_deadline;
      break;
    case TaskFate::FailedNoTarget:
      ++tot.failed_no_target;
      break;
    case TaskFate::FailedNodeDestroyed:
      ++tot.failed_node_destroyed;
      break;
    case TaskFate::Pending:
      break;
  }
  const double at = std::max(0.0, task.resolved_at);
  const std::size_t w = std::min(static_cast<std::size_t>(at / width_), windows_ - 1);
  ++completed_[t][w];
  if (task.fate == TaskFate::Succeeded) ++succeeded_[t][w];
}

void MetricsCollector::set_pending(TownId town, std::uint64_t pending) {
  totals_[town_index(town)].pending_at_end = pending;
}

std::vector<SuccessWindow> MetricsCollector::time_series(TownId town) const {
  const std::size_t t = town_index(town);
  std::vector<SuccessWindow> out;
  out.reserve(windows_);
  for (std::size_t w = 0; w < windows_; ++w) {
    const double start = static_cast<double>(w) * width_;
    out.push_back({town, start, std::min(start + width_, horizon_), completed_[t][w],
                   succeeded_[t][w]});
  }
  return out;
}

const TownTotals& MetricsCollector::totals(TownId town) const {
  return totals_[town_index(town)];
}

RunSummary MetricsCollector::summary(std::string scenario, std::uint64_t seed,
                                     std::string config) const {
  RunSummary s;
  s.scenario = std::move(scenario);
  s.seed = seed;
  s.horizon = horizon_;
  s.window = width_;
  s.config = std::move(config);
  std::uint64_t ok = 0;
  std::uint64_t resolved = 0;
  for (std::size_t i = 0; i < towns_.size(); ++i) {
    s.towns[towns_[i]] = totals_[i];
    ok += totals_[i].succeeded;
    resolved += totals_[i].resolved();
  }
  s.success_rate = resolved == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(resolved);
  return s;
}

void write_time_series_csv(std::ostream& out, const TimeSeriesTable& table) {
  out << kTimeSeriesHeader << '\n';
  for (const auto& [town, series] : table) {
    for (const auto& w : series) {
      out << raw(town) << ',' << shortest(w.window_start) << ',' << shortest(w.window_end) << ','
          << w.completed << ',' << w.succeeded << ',';
      if (auto r = w.rate()) out << shortest(*r);
      out << '\n';
    }
  }
}

TimeSeriesTable read_time_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTimeSeriesHeader) {
    throw std::runtime_error("time series: expected header '" + std::string(kTimeSeriesHeader) +
                             "'");
  }
  TimeSeriesTable table;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 6) {
      throw std::runtime_error("time series line " + std::to_string(n) + ": expected 6 fields");
    }
    SuccessWindow w;
    w.town = TownId{static_cast<std::uint32_t>(parse_count(cells[0], n))};
    w.window_start = parse_double(cells[1], n);
    w.window_end = parse_double(cells[2], n);
    w.completed = parse_count(cells[3], n);
    w.succeeded = parse_count(cells[4], n);
    if (w.succeeded > w.completed) {
      throw std::runtime_error("time series line " + std::to_string(n) +
                               ": succeeded exceeds completed");
    }
    table[w.town].push_back(w);
  }
  return table;
}

void write_summary(std::ostream& out, const RunSummary& s) {
  nlohmann::ordered_json j;
  j["scenario"] = s.scenario;
  j["seed"] = s.seed;
  j["horizon"] = s.horizon;
  j["window"] = s.window;
  j["success_rate"] = s.success_rate;
  auto& towns = j["towns"];
  towns = nlohmann::ordered_json::object();
  for (const auto& [id, t] : s.towns) {
    towns[std::to_string(raw(id))] = {
        {"generated", t.generated},
        {"succeeded", t.succeeded},
        {"failed_deadline", t.failed_deadline},
        {"failed_no_target", t.failed_no_target},
        {"failed_node_destroyed", t.failed_node_destroyed},
        {"pending_at_end", t.pending_at_end},
    };
  }
  j["config"] = s.config;
  out << j.dump(2) << '\n';
}

void write_svg_plot(std::ostream& out, const TimeSeriesTable& table, const std::string& title) {
  constexpr double kW = 800, kH = 420, kLeft = 60, kRight = 140, kTop = 40, kBottom = 50;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  double t_max = 0.0;
  for (const auto& [town, series] : table) {
    for (const auto& w : series) t_max = std::max(t_max, w.window_end);
  }
  if (t_max <= 0.0) t_max = 1.0;
  auto px = [&](double t) { return kLeft + plot_w * t / t_max; };
  auto py = [&](double r) { return kTop + plot_h * (1.0 - r); };
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double r = i / 4.0;
    out << "<line x1=\"" << kLeft << "\" y1=\"" << py(r) << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << py(r) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(r) + 4 << "\" text-anchor=\"end\">"
        << static_cast<int>(r * 100) << "%</text>\n";
  }
  for (int i = 0; i <= 8; ++i) {
    const double t = t_max * i / 8.0;
    out << "<text x=\"" << px(t) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << shortest(std::round(t)) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\">time (s)</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">task success rate</text>\n";

  std::size_t k = 0;
  for (const auto& [town, series] : table) {
    const char* color = kColors[k % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& w : series) {
      if (auto r = w.rate()) {
        out << px((w.window_start + w.window_end) / 2) << ',' << py(*r) << ' ';
      }
    }
    out << "\"/>\n";
    const double ly = kTop + 20 + 20.0 * static_cast<double>(k);
    out << "<line x1=\"" << kW - kRight + 15 << "\" y1=\"" << ly << "\" x2=\""
        << kW - kRight + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kW - kRight + 46 << "\" y=\"" << ly + 4 << "\">Town-" << raw(town)
        << "</text>\n";
    ++k;
  }
  out << "</svg>\n";
}

std::optional<double> mean_rate(const std::vector<SuccessWindow>& series, SimTime from,
                                SimTime to) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& w : series) {
    if (w.window_start < from || w.window_end > to) continue;
    if (auto r = w.rate()) {
      sum += *r;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace airsim
