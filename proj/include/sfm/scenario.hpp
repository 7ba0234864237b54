#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfm/dynamics.hpp"
#include "sfm/environment.hpp"

namespace sfm {

/// Closed interval sampled uniformly; lo == hi is a fixed value.
struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;

  constexpr ValueRange() = default;
  constexpr ValueRange(double v) : lo(v), hi(v) {}
  constexpr ValueRange(double l, double h) : lo(l), hi(h) {}

  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

struct SpawnRegion {
  Vec2 min;
  Vec2 max;

  friend bool operator==(const SpawnRegion&, const SpawnRegion&) = default;
};

/// One population entry: a single explicitly placed pedestrian, or `count`
/// pedestrians placed at random inside `region`.
struct PopulationSpec {
  /// Id of the explicit pedestrian, or the first id of a group.
  PedestrianId id = 0;
  std::optional<Vec2> position;
  std::optional<SpawnRegion> region;
  std::size_t count = 1;
  Vec2 velocity;

  ValueRange radius{0.3};
  ValueRange mass{80.0};
  ValueRange v0{1.5};
  /// Absolute cap; defaults to twice the sampled v0.
  std::optional<double> v_max;
  double tau = 0.5;
  std::optional<double> deadline;

  double p = 0.0;
  double M = 0.0;
  double E = 0.0;
  double E_m = 1.0;
  double D = 0.0;
  double f = 0.0;
  std::optional<std::string> route;
  std::optional<Vec2> route_target;

  bool is_group() const { return region.has_value(); }

  friend bool operator==(const PopulationSpec&, const PopulationSpec&) = default;
};

/// Scenario-level configuration defaults (the `defaults` section).
struct ConfigOverrides {
  std::optional<Variant> variant;
  std::map<std::string, double> values;

  /// Applies every override to `cfg`. Throws std::invalid_argument for an
  /// unknown key or a non-integral value for an integer key.
  void apply(SimulationConfig& cfg) const;

  friend bool operator==(const ConfigOverrides&, const ConfigOverrides&) = default;
};

/// Names accepted in the `defaults` section (besides "variant").
const std::vector<std::string>& config_keys();
/// Sets one named numeric configuration value.
void set_config_value(SimulationConfig& cfg, std::string_view key, double value);
double get_config_value(const SimulationConfig& cfg, std::string_view key);

struct Scenario {
  int version = 1;
  std::string name;
  Environment env;
  std::map<std::string, std::vector<Vec2>> routes;
  std::vector<PopulationSpec> population;
  ConfigOverrides defaults;

  std::size_t pedestrian_count() const;
  /// Name plus a hash of the canonical serialization; equal for identical scenarios.
  std::string identity() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class ScenarioErrorKind {
  Syntax,
  UnsupportedVersion,
  UnknownField,
  MissingField,
  TypeMismatch,
  RangeViolation,
  DegenerateGeometry,
  ExitOffWall,
  DanglingRoute,
  DuplicateId,
  Overlap,
  SpawnFailure,
  Io,
};

std::string_view to_string(ScenarioErrorKind kind);

/// Rejection of a scenario document. `path` is a JSON pointer to the
/// offending element; `line` is 1-based (0 when unknown).
class ScenarioError : public std::runtime_error {
public:
  ScenarioError(ScenarioErrorKind kind, std::string path, std::size_t line, const std::string& detail);

  ScenarioErrorKind kind() const { return kind_; }
  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

private:
  ScenarioErrorKind kind_;
  std::string path_;
  std::size_t line_;
  std::string detail_;
};

/// Parses and fully validates a scenario document.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Canonical document; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// Throws ScenarioError for any invariant violation (no line information).
void validate_scenario(const Scenario& s);

/// Instantiates the population and geometry. Random placement and attribute
/// ranges draw from counter-based streams keyed by `seed`.
World build_world(const Scenario& s, std::uint64_t seed);

/// Built-in defaults, then the scenario's defaults section.
SimulationConfig effective_config(const Scenario& s);

}  // namespace sfm
