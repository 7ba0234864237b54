#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfm/environment.hpp"
#include "sfm/trajectory.hpp"

namespace sfm {

/// Observables of a completed run.
struct RunSummary {
  /// Label used as the key in comparisons (normally the variant name).
  std::string label;
  std::string scenario_id;
  std::uint64_t seed = 0;
  bool has_nervousness = false;

  std::size_t population = 0;
  std::size_t evacuated = 0;
  bool all_evacuated = false;
  /// Last exit time when everyone left; otherwise the end of the run.
  double evacuation_time_total = 0.0;
  std::map<PedestrianId, double> exit_times;
  /// Sorted crossing times per exit id.
  std::map<std::string, std::vector<double>> exit_crossings;
  /// Crossings per second of simulated time, per exit id.
  std::map<std::string, double> mean_flow;
  /// Largest per-cell density over all logged frames (1/m^2).
  double peak_density = 0.0;
  std::vector<double> series_time;
  std::vector<double> series_mean_speed;
  /// Mean nervousness per frame; empty unless has_nervousness.
  std::vector<double> series_mean_nervousness;
  double contact_impulse = 0.0;
};

struct SummaryContext {
  std::string label;
  std::string scenario_id;
  std::uint64_t seed = 0;
  bool has_nervousness = false;
  double density_cell = 1.0;
};

RunSummary summarize(const TrajectoryLog& log, const SummaryContext& ctx);

/// Named scalar observables in a fixed order. mean_speed and
/// mean_nervousness are time averages of the series; mean_nervousness is
/// absent for runs without a nervousness state.
std::vector<std::pair<std::string, std::optional<double>>> scalar_metrics(const RunSummary& s);

/// Crossings in the half-open window [start, start + window), per second.
double flow_rate(std::span<const double> crossings, double start, double window);
/// flow_rate over consecutive windows starting at 0 and spaced `stride` apart.
std::vector<double> flow_series(std::span<const double> crossings, double window, double stride, double end);
/// Largest interval between consecutive crossings (0 with fewer than two).
double max_inter_exit_gap(std::span<const double> crossings);

/// Pedestrian counts per square cell divided by the cell area.
struct DensityField {
  Vec2 origin;
  double cell = 1.0;
  long nx = 0;
  long ny = 0;
  std::vector<double> values;

  double at(long ix, long iy) const { return values[static_cast<std::size_t>(iy * nx + ix)]; }
  double max() const;
  /// Sum of value * cell area.
  double integral() const;
};

/// Field over the box [lo, hi]; points outside it are ignored.
DensityField local_density_field(std::span<const Vec2> positions, double cell, Vec2 lo, Vec2 hi);
/// Field over the cell-aligned bounding box of the points.
DensityField local_density_field(std::span<const Vec2> positions, double cell);

/// One cell of the comparison table. Deltas are against the first summary.
struct ComparisonRow {
  std::string metric;
  std::string label;
  std::optional<double> value;
  std::optional<double> abs_delta;
  std::optional<double> rel_delta;
};

struct ComparisonTable {
  std::vector<std::string> labels;
  std::vector<std::string> metrics;
  std::vector<ComparisonRow> rows;

  const ComparisonRow& row(const std::string& metric, const std::string& label) const;
  /// Long format: metric,label,value,abs_delta,rel_delta.
  std::string to_csv() const;
  /// Wide format: metric followed by one value column per label.
  std::string to_wide_csv() const;
};

/// Tabulates metric values and deltas. Requires at least two summaries from
/// the same scenario and seed (std::invalid_argument otherwise). When `logs`
/// is given, adds the maximum position deviation from the first run.
ComparisonTable compare_runs(std::span<const RunSummary> summaries,
                             std::span<const TrajectoryLog> logs = {});

/// Largest |x_a - x_b| over pedestrians present at the same frame index and
/// time in both logs; pedestrians present in only one log count as infinite.
double max_trajectory_deviation(const TrajectoryLog& a, const TrajectoryLog& b);

/// First violation of p, M, D, f in [0, 1], E in [0, E_m] or a non-finite
/// logged value; std::nullopt when the log is clean.
std::optional<std::string> find_state_range_violation(const TrajectoryLog& log);

}  // namespace sfm
