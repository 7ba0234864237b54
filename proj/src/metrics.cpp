#include "sfm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sfm/trajectory_io.hpp"

namespace sfm {

RunSummary summarize(const TrajectoryLog& log, const SummaryContext& ctx) {
  RunSummary s;
  s.label = ctx.label;
  s.scenario_id = ctx.scenario_id;
  s.seed = ctx.seed;
  s.has_nervousness = ctx.has_nervousness;
  s.population = log.population;
  s.evacuated = log.exits.size();
  s.all_evacuated = log.all_evacuated;
  s.contact_impulse = log.contact_impulse;

  double last_exit = 0.0;
  for (const ExitEvent& e : log.exits) {
    s.exit_times[e.id] = e.time;
    s.exit_crossings[e.exit_id].push_back(e.time);
    last_exit = std::max(last_exit, e.time);
  }
  for (auto& [id, times] : s.exit_crossings) std::sort(times.begin(), times.end());
  s.evacuation_time_total = log.all_evacuated ? last_exit : log.end_time;
  for (const auto& [id, times] : s.exit_crossings)
    s.mean_flow[id] = log.end_time > 0.0 ? static_cast<double>(times.size()) / log.end_time : 0.0;

  std::vector<Vec2> positions;
  for (const Frame& frame : log.frames) {
    positions.clear();
    double speed_sum = 0.0;
    double p_sum = 0.0;
    for (const AgentRecord& a : frame.agents) {
      positions.push_back(a.pos);
      speed_sum += norm(a.vel);
      p_sum += a.p;
    }
    const double n = static_cast<double>(frame.agents.size());
    s.series_time.push_back(frame.time);
    s.series_mean_speed.push_back(n > 0 ? speed_sum / n : 0.0);
    if (s.has_nervousness) s.series_mean_nervousness.push_back(n > 0 ? p_sum / n : 0.0);
    if (!positions.empty()) s.peak_density = std::max(s.peak_density, local_density_field(positions, ctx.density_cell).max());
  }
  return s;
}

double flow_rate(std::span<const double> crossings, double start, double window) {
  if (!(window > 0.0)) throw std::invalid_argument("flow window must be positive");
  const double end = start + window;
  const auto count = std::count_if(crossings.begin(), crossings.end(), [&](double t) { return t >= start && t < end; });
  return static_cast<double>(count) / window;
}

std::vector<double> flow_series(std::span<const double> crossings, double window, double stride, double end) {
  if (!(stride > 0.0)) throw std::invalid_argument("flow stride must be positive");
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * stride;
    if (start >= end) break;
    out.push_back(flow_rate(crossings, start, window));
  }
  return out;
}

double max_inter_exit_gap(std::span<const double> crossings) {
  std::vector<double> sorted(crossings.begin(), crossings.end());
  std::sort(sorted.begin(), sorted.end());
  double gap = 0.0;
  for (std::size_t k = 1; k < sorted.size(); ++k) gap = std::max(gap, sorted[k] - sorted[k - 1]);
  return gap;
}

double DensityField::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double DensityField::integral() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * cell * cell;
}

DensityField local_density_field(std::span<const Vec2> positions, double cell, Vec2 lo, Vec2 hi) {
  if (!(cell > 0.0)) throw std::invalid_argument("density grid cell must be positive");
  DensityField field;
  field.origin = lo;
  field.cell = cell;
  field.nx = std::max(1L, static_cast<long>(std::ceil((hi.x - lo.x) / cell)));
  field.ny = std::max(1L, static_cast<long>(std::ceil((hi.y - lo.y) / cell)));
  field.values.assign(static_cast<std::size_t>(field.nx * field.ny), 0.0);
  const double inv_area = 1.0 / (cell * cell);
  for (Vec2 p : positions) {
    if (p.x < lo.x || p.y < lo.y || p.x > hi.x || p.y > hi.y) continue;
    const long ix = std::min(field.nx - 1, static_cast<long>((p.x - lo.x) / cell));
    const long iy = std::min(field.ny - 1, static_cast<long>((p.y - lo.y) / cell));
    field.values[static_cast<std::size_t>(iy * field.nx + ix)] += inv_area;
  }
  return field;
}

DensityField local_density_field(std::span<const Vec2> positions, double cell) {
  if (positions.empty()) return local_density_field(positions, cell, {0.0, 0.0}, {cell, cell});
  Vec2 lo = positions.front(), hi = positions.front();
  for (Vec2 p : positions) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  lo = {std::floor(lo.x / cell) * cell, std::floor(lo.y / cell) * cell};
  hi = {(std::floor(hi.x / cell) + 1.0) * cell, (std::floor(hi.y / cell) + 1.0) * cell};
  return local_density_field(positions, cell, lo, hi);
}

const ComparisonRow& ComparisonTable::row(const std::string& metric, const std::string& label) const {
  for (const ComparisonRow& r : rows)
    if (r.metric == metric && r.label == label) return r;
  throw std::out_of_range("no comparison row for " + metric + "/" + label);
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_float(*v) : "NA"; }

double time_average(const std::vector<double>& t, const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1 || t.back() <= t.front()) return v.front();
  double area = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) area += 0.5 * (v[k] + v[k - 1]) * (t[k] - t[k - 1]);
  return area / (t.back() - t.front());
}

}  // namespace

std::vector<std::pair<std::string, std::optional<double>>> scalar_metrics(const RunSummary& s) {
  double flow = 0.0;
  for (const auto& [id, f] : s.mean_flow) flow += f;
  std::optional<double> nervousness;
  if (s.has_nervousness) nervousness = time_average(s.series_time, s.series_mean_nervousness);
  return {
      {"evacuation_time_total", s.evacuation_time_total},
      {"evacuated", static_cast<double>(s.evacuated)},
      {"mean_flow", flow},
      {"peak_density", s.peak_density},
      {"mean_speed", time_average(s.series_time, s.series_mean_speed)},
      {"mean_nervousness", nervousness},
      {"contact_impulse", s.contact_impulse},
  };
}

std::string ComparisonTable::to_csv() const {
  std::string out = "metric,label,value,abs_delta,rel_delta\n";
  for (const ComparisonRow& r : rows)
    out += r.metric + "," + r.label + "," + cell(r.value) + "," + cell(r.abs_delta) + "," + cell(r.rel_delta) + "\n";
  return out;
}

std::string ComparisonTable::to_wide_csv() const {
  std::string out = "metric";
  for (const std::string& l : labels) out += "," + l;
  out += "\n";
  for (const std::string& m : metrics) {
    out += m;
    for (const std::string& l : labels) out += "," + cell(row(m, l).value);
    out += "\n";
  }
  return out;
}

ComparisonTable compare_runs(std::span<const RunSummary> summaries, std::span<const TrajectoryLog> logs) {
  if (summaries.size() < 2) throw std::invalid_argument("comparison needs at least two runs");
  const RunSummary& base = summaries.front();
  for (const RunSummary& s : summaries) {
    if (s.scenario_id != base.scenario_id || s.seed != base.seed)
      throw std::invalid_argument("runs are not comparable: '" + base.label + "' used scenario " + base.scenario_id +
                                  " seed " + std::to_string(base.seed) + ", '" + s.label + "' used scenario " +
                                  s.scenario_id + " seed " + std::to_string(s.seed));
  }
  if (!logs.empty() && logs.size() != summaries.size())
    throw std::invalid_argument("comparison needs one log per summary");

  ComparisonTable table;
  std::map<std::string, int> seen;
  for (const RunSummary& s : summaries) {
    const int n = ++seen[s.label];
    table.labels.push_back(n == 1 ? s.label : s.label + "#" + std::to_string(n));
  }

  auto add_metric = [&](const std::string& name, const std::vector<std::optional<double>>& values) {
    table.metrics.push_back(name);
    const std::optional<double> b = values.front();
    for (std::size_t k = 0; k < values.size(); ++k) {
      ComparisonRow r{name, table.labels[k], values[k], std::nullopt, std::nullopt};
      if (values[k] && b) {
        r.abs_delta = *values[k] - *b;
        if (*r.abs_delta == 0.0)
          r.rel_delta = 0.0;
        else if (*b != 0.0)
          r.rel_delta = *r.abs_delta / std::abs(*b);
      }
      table.rows.push_back(r);
    }
  };

  std::vector<std::vector<std::pair<std::string, std::optional<double>>>> scalars;
  for (const RunSummary& s : summaries) scalars.push_back(scalar_metrics(s));
  for (std::size_t m = 0; m < scalars.front().size(); ++m) {
    std::vector<std::optional<double>> values;
    for (const auto& sc : scalars) values.push_back(sc[m].second);
    add_metric(scalars.front()[m].first, values);
  }
  if (!logs.empty()) {
    std::vector<std::optional<double>> values;
    for (const TrajectoryLog& log : logs) values.push_back(max_trajectory_deviation(logs.front(), log));
    add_metric("max_trajectory_delta", values);
  }
  return table;
}

double max_trajectory_deviation(const TrajectoryLog& a, const TrajectoryLog& b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a.frames.size() != b.frames.size()) return inf;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    const Frame& fa = a.frames[k];
    const Frame& fb = b.frames[k];
    if (fa.time != fb.time || fa.agents.size() != fb.agents.size()) return inf;
    for (std::size_t m = 0; m < fa.agents.size(); ++m) {
      if (fa.agents[m].id != fb.agents[m].id) return inf;
      worst = std::max(worst, norm(fa.agents[m].pos - fb.agents[m].pos));
    }
  }
  return worst;
}

std::optional<std::string> find_state_range_violation(const TrajectoryLog& log) {
  for (const Frame& frame : log.frames) {
    for (const AgentRecord& a : frame.agents) {
      const auto where = [&](const char* what) {
        std::ostringstream os;
        os << "t=" << frame.time << " pedestrian " << a.id << ": " << what;
        return os.str();
      };
      const StepForces& f = a.forces;
      for (Vec2 v : {a.pos, a.vel, f.preferred, f.social_rep, f.social_att, f.pushing, f.friction, f.noise})
        if (!is_finite(v)) return where("non-finite value");
      for (double x : {a.p, a.M, a.E, a.E_m, a.D, a.f})
        if (!std::isfinite(x)) return where("non-finite psychological state");
      if (a.p < 0.0 || a.p > 1.0) return where("p outside [0, 1]");
      if (a.M < 0.0 || a.M > 1.0) return where("M outside [0, 1]");
      if (a.D < 0.0 || a.D > 1.0) return where("D outside [0, 1]");
      if (a.f < 0.0 || a.f > 1.0) return where("f outside [0, 1]");
      if (a.E < 0.0 || a.E > a.E_m) return where("E outside [0, E_m]");
    }
  }
  return std::nullopt;
}

}  // namespace sfm
