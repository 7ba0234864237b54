#include "sfm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "sfm/rng.hpp"

namespace sfm {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kExitTolerance = 1e-6;
constexpr int kMaxSpawnAttempts = 10'000;
constexpr std::uint64_t kSpawnKeySalt = 0x737061776Eull;  // "spawn"

// ---------------------------------------------------------------------------
// Line lookup: maps JSON pointers of a syntactically valid document to the
// line on which each value starts.

class LocationIndex {
public:
  explicit LocationIndex(std::string_view text) : text_(text) {
    skip_ws();
    if (pos_ < text_.size()) scan_value("");
  }

  std::size_t line_of(std::string path) const {
    for (;;) {
      if (auto it = lines_.find(path); it != lines_.end()) return it->second;
      if (path.empty()) return 0;
      path.erase(path.rfind('/'));
    }
  }

private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
      } else if (c != ' ' && c != '\t' && c != '\r') {
        break;
      }
      ++pos_;
    }
  }

  std::string read_string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == 'u') {
          out += '?';
          pos_ += 4;
        } else if (pos_ < text_.size()) {
          out += text_[pos_];
        }
      } else {
        out += text_[pos_];
      }
      ++pos_;
    }
    ++pos_;  // closing quote
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out += c;
    }
    return out;
  }

  void scan_value(const std::string& path) {
    skip_ws();
    if (pos_ >= text_.size()) return;
    lines_.emplace(path, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '}') {
        ++pos_;
        return;
      }
      while (pos_ < text_.size()) {
        skip_ws();
        const std::string key = read_string();
        skip_ws();
        ++pos_;  // ':'
        scan_value(path + "/" + escape(key));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_++] == '}') return;
      }
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return;
      }
      for (std::size_t k = 0; pos_ < text_.size(); ++k) {
        scan_value(path + "/" + std::to_string(k));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_++] == ']') return;
      }
    } else if (c == '"') {
      read_string();
    } else {
      while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos)
        ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::unordered_map<std::string, std::size_t> lines_;
};

// ---------------------------------------------------------------------------
// Typed readers. Every failure names the JSON pointer and line.

class Reader {
public:
  explicit Reader(const LocationIndex* index) : index_(index) {}

  [[noreturn]] void fail(ScenarioErrorKind kind, const std::string& path, const std::string& detail) const {
    throw ScenarioError(kind, path, index_ ? index_->line_of(path) : 0, detail);
  }

  void expect_object(const json& j, const std::string& path) const {
    if (!j.is_object()) fail(ScenarioErrorKind::TypeMismatch, path, "expected an object");
  }

  void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) const {
    expect_object(j, path);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
        fail(ScenarioErrorKind::UnknownField, path + "/" + it.key(), "unknown field '" + it.key() + "'");
    }
  }

  const json& require(const json& j, const std::string& path, const char* key) const {
    if (!j.contains(key)) fail(ScenarioErrorKind::MissingField, path + "/" + key, std::string("missing field '") + key + "'");
    return j.at(key);
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(ScenarioErrorKind::TypeMismatch, path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ScenarioErrorKind::RangeViolation, path, "value is not finite");
    return v;
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(ScenarioErrorKind::TypeMismatch, path, "expected a string");
    return j.get<std::string>();
  }

  Vec2 vec2(const json& j, const std::string& path) const {
    if (!j.is_array() || j.size() != 2) fail(ScenarioErrorKind::TypeMismatch, path, "expected [x, y]");
    return {number(j[0], path + "/0"), number(j[1], path + "/1")};
  }

  ValueRange range(const json& j, const std::string& path) const {
    if (j.is_number()) return ValueRange(number(j, path));
    if (!j.is_array() || j.size() != 2)
      fail(ScenarioErrorKind::TypeMismatch, path, "expected a number or [lo, hi]");
    const ValueRange r(number(j[0], path + "/0"), number(j[1], path + "/1"));
    if (r.lo > r.hi) fail(ScenarioErrorKind::RangeViolation, path, "range has lo > hi");
    return r;
  }

  std::uint64_t unsigned_integer(const json& j, const std::string& path) const {
    if (!j.is_number_integer() || (j.is_number_integer() && j.get<std::int64_t>() < 0))
      fail(ScenarioErrorKind::TypeMismatch, path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
  }

  WallSegment segment(const json& j, const std::string& path, bool attractive,
                      std::initializer_list<std::string_view> keys) const {
    check_keys(j, path, keys);
    const Vec2 a = vec2(require(j, path, "a"), path + "/a");
    const Vec2 b = vec2(require(j, path, "b"), path + "/b");
    if (a == b) fail(ScenarioErrorKind::DegenerateGeometry, path, "segment has zero length");
    return WallSegment(a, b, attractive);
  }

private:
  const LocationIndex* index_;
};

PopulationSpec read_population_entry(const Reader& r, const json& j, const std::string& path,
                                     PedestrianId next_id) {
  r.check_keys(j, path,
               {"id", "id_start", "position", "count", "region", "velocity", "radius", "mass", "v0", "v_max", "tau",
                "deadline", "p", "M", "E", "E_m", "D", "f", "route", "route_target"});
  PopulationSpec p;
  const bool group = j.contains("region");
  if (group) {
    const std::string rp = path + "/region";
    const json& reg = j.at("region");
    r.check_keys(reg, rp, {"min", "max"});
    SpawnRegion region{r.vec2(r.require(reg, rp, "min"), rp + "/min"), r.vec2(r.require(reg, rp, "max"), rp + "/max")};
    if (!(region.min.x < region.max.x && region.min.y < region.max.y))
      r.fail(ScenarioErrorKind::RangeViolation, rp, "region min must be below max");
    p.region = region;
    p.count = r.unsigned_integer(r.require(j, path, "count"), path + "/count");
    if (p.count == 0) r.fail(ScenarioErrorKind::RangeViolation, path + "/count", "count must be positive");
    for (const char* k : {"id", "position", "velocity"})
      if (j.contains(k))
        r.fail(ScenarioErrorKind::UnknownField, path + "/" + k, std::string("'") + k + "' is not allowed on a group");
    p.id = j.contains("id_start") ? static_cast<PedestrianId>(r.unsigned_integer(j["id_start"], path + "/id_start"))
                                  : next_id;
  } else {
    for (const char* k : {"count", "id_start"})
      if (j.contains(k))
        r.fail(ScenarioErrorKind::UnknownField, path + "/" + k,
               std::string("'") + k + "' requires a spawn region");
    p.id = static_cast<PedestrianId>(r.unsigned_integer(r.require(j, path, "id"), path + "/id"));
    p.position = r.vec2(r.require(j, path, "position"), path + "/position");
    if (j.contains("velocity")) p.velocity = r.vec2(j["velocity"], path + "/velocity");
  }
  if (j.contains("radius")) p.radius = r.range(j["radius"], path + "/radius");
  if (j.contains("mass")) p.mass = r.range(j["mass"], path + "/mass");
  if (j.contains("v0")) p.v0 = r.range(j["v0"], path + "/v0");
  if (j.contains("v_max")) p.v_max = r.number(j["v_max"], path + "/v_max");
  if (j.contains("tau")) p.tau = r.number(j["tau"], path + "/tau");
  if (j.contains("deadline")) p.deadline = r.number(j["deadline"], path + "/deadline");
  if (j.contains("p")) p.p = r.number(j["p"], path + "/p");
  if (j.contains("M")) p.M = r.number(j["M"], path + "/M");
  if (j.contains("E")) p.E = r.number(j["E"], path + "/E");
  if (j.contains("E_m")) p.E_m = r.number(j["E_m"], path + "/E_m");
  if (j.contains("D")) p.D = r.number(j["D"], path + "/D");
  if (j.contains("f")) p.f = r.number(j["f"], path + "/f");
  if (j.contains("route")) p.route = r.string(j["route"], path + "/route");
  if (j.contains("route_target")) p.route_target = r.vec2(j["route_target"], path + "/route_target");
  return p;
}

// ---------------------------------------------------------------------------
// Semantic validation, shared by parse_scenario and validate_scenario.

void check_scenario(const Scenario& s, const Reader& r) {
  for (std::size_t k = 0; k < s.env.exits.size(); ++k) {
    const Exit& e = s.env.exits[k];
    const std::string path = "/exits/" + std::to_string(k);
    for (Vec2 end : {e.segment.a, e.segment.b}) {
      const bool on_wall = std::any_of(s.env.walls.begin(), s.env.walls.end(), [&](const WallSegment& w) {
        return point_segment_distance(end, w.a, w.b) <= kExitTolerance;
      });
      if (!on_wall)
        r.fail(ScenarioErrorKind::ExitOffWall, path, "exit '" + e.id + "' endpoint does not touch any wall");
    }
    for (std::size_t m = 0; m < k; ++m)
      if (s.env.exits[m].id == e.id) r.fail(ScenarioErrorKind::DuplicateId, path + "/id", "duplicate exit id '" + e.id + "'");
  }
  for (const auto& [name, pts] : s.routes)
    if (pts.empty()) r.fail(ScenarioErrorKind::RangeViolation, "/routes/" + name, "route '" + name + "' is empty");

  std::map<PedestrianId, std::size_t> ids;
  for (std::size_t k = 0; k < s.population.size(); ++k) {
    const PopulationSpec& p = s.population[k];
    const std::string path = "/population/" + std::to_string(k);
    auto range_check = [&](bool ok, const char* field, const std::string& what) {
      if (!ok) r.fail(ScenarioErrorKind::RangeViolation, path + "/" + field, std::string(field) + " " + what);
    };
    range_check(p.radius.lo > 0.0, "radius", "must be positive");
    range_check(p.mass.lo > 0.0, "mass", "must be positive");
    range_check(p.v0.lo > 0.0, "v0", "must be positive");
    range_check(p.tau > 0.0, "tau", "must be positive");
    if (p.v_max) range_check(*p.v_max >= p.v0.hi, "v_max", "must be at least v0");
    if (p.deadline) range_check(*p.deadline > 0.0, "deadline", "must be positive");
    range_check(p.p >= 0.0 && p.p <= 1.0, "p", "(nervousness) must lie in [0, 1]");
    range_check(p.M >= 0.0 && p.M <= 1.0, "M", "(memory) must lie in [0, 1]");
    range_check(p.D >= 0.0 && p.D <= 1.0, "D", "(dependency) must lie in [0, 1]");
    range_check(p.f >= 0.0 && p.f <= 1.0, "f", "(familiarity) must lie in [0, 1]");
    range_check(p.E_m >= 0.0, "E_m", "must be non-negative");
    range_check(p.E >= 0.0 && p.E <= p.E_m, "E", "(excitement) must lie in [0, E_m]");
    if (p.route && !s.routes.contains(*p.route))
      r.fail(ScenarioErrorKind::DanglingRoute, path + "/route", "route '" + *p.route + "' is not defined");
    if (!p.route && s.env.exits.empty())
      r.fail(ScenarioErrorKind::MissingField, path + "/route", "no route given and the scenario has no exit");
    for (std::size_t n = 0; n < p.count; ++n) {
      const PedestrianId id = p.id + static_cast<PedestrianId>(n);
      if (auto [it, fresh] = ids.emplace(id, k); !fresh)
        r.fail(ScenarioErrorKind::DuplicateId, path + (p.is_group() ? "/id_start" : "/id"),
               "pedestrian id " + std::to_string(id) + " is already used by /population/" + std::to_string(it->second));
    }
  }

  // Explicit placements must not overlap (touching is allowed).
  for (std::size_t a = 0; a < s.population.size(); ++a) {
    const PopulationSpec& pa = s.population[a];
    if (pa.is_group()) continue;
    for (std::size_t b = 0; b < a; ++b) {
      const PopulationSpec& pb = s.population[b];
      if (pb.is_group()) continue;
      if (norm(*pa.position - *pb.position) < pa.radius.lo + pb.radius.lo)
        r.fail(ScenarioErrorKind::Overlap, "/population/" + std::to_string(a) + "/position",
               "pedestrians " + std::to_string(pb.id) + " and " + std::to_string(pa.id) + " overlap at t=0");
    }
  }
}

// ---------------------------------------------------------------------------
// Configuration keys.

struct ConfigKey {
  std::string name;
  std::function<double(const SimulationConfig&)> get;
  std::function<void(SimulationConfig&, double)> set;
};

const std::vector<ConfigKey>& key_table() {
  static const std::vector<ConfigKey> table = {
      {"dt", [](const SimulationConfig& c) { return static_cast<double>(c.dt); },
       [](SimulationConfig& c, double v) { c.dt = v; }},
      {"duration", [](const SimulationConfig& c) { return static_cast<double>(c.duration); },
       [](SimulationConfig& c, double v) { c.duration = v; }},
      {"seed", [](const SimulationConfig& c) { return static_cast<double>(c.seed); },
       [](SimulationConfig& c, double v) { c.seed = static_cast<std::uint64_t>(v); }},
      {"noise_amplitude", [](const SimulationConfig& c) { return static_cast<double>(c.noise_amplitude); },
       [](SimulationConfig& c, double v) { c.noise_amplitude = v; }},
      {"neighbor_cutoff", [](const SimulationConfig& c) { return c.neighbor_cutoff; },
       [](SimulationConfig& c, double v) {
         c.neighbor_cutoff = v;
         c.cell_size = v;
       }},
      {"cell_size", [](const SimulationConfig& c) { return static_cast<double>(c.cell_size); },
       [](SimulationConfig& c, double v) { c.cell_size = v; }},
      {"output_every", [](const SimulationConfig& c) { return static_cast<double>(c.output_every); },
       [](SimulationConfig& c, double v) { c.output_every = static_cast<std::uint64_t>(v); }},
      {"A_r", [](const SimulationConfig& c) { return static_cast<double>(c.model.social.A_r); },
       [](SimulationConfig& c, double v) { c.model.social.A_r = v; }},
      {"B_r", [](const SimulationConfig& c) { return static_cast<double>(c.model.social.B_r); },
       [](SimulationConfig& c, double v) { c.model.social.B_r = v; }},
      {"A_att", [](const SimulationConfig& c) { return static_cast<double>(c.model.social.A_att); },
       [](SimulationConfig& c, double v) { c.model.social.A_att = v; }},
      {"B_att", [](const SimulationConfig& c) { return static_cast<double>(c.model.social.B_att); },
       [](SimulationConfig& c, double v) { c.model.social.B_att = v; }},
      {"lambda", [](const SimulationConfig& c) { return static_cast<double>(c.model.social.lambda); },
       [](SimulationConfig& c, double v) { c.model.social.lambda = v; }},
      {"attraction_decay_time", [](const SimulationConfig& c) { return static_cast<double>(c.model.social.attraction_decay_time); },
       [](SimulationConfig& c, double v) { c.model.social.attraction_decay_time = v; }},
      {"obstacle_A_r", [](const SimulationConfig& c) { return static_cast<double>(c.model.obstacle.A_r); },
       [](SimulationConfig& c, double v) { c.model.obstacle.A_r = v; }},
      {"obstacle_B_r", [](const SimulationConfig& c) { return static_cast<double>(c.model.obstacle.B_r); },
       [](SimulationConfig& c, double v) { c.model.obstacle.B_r = v; }},
      {"obstacle_A_att", [](const SimulationConfig& c) { return static_cast<double>(c.model.obstacle.A_att); },
       [](SimulationConfig& c, double v) { c.model.obstacle.A_att = v; }},
      {"obstacle_B_att", [](const SimulationConfig& c) { return static_cast<double>(c.model.obstacle.B_att); },
       [](SimulationConfig& c, double v) { c.model.obstacle.B_att = v; }},
      {"obstacle_lambda", [](const SimulationConfig& c) { return static_cast<double>(c.model.obstacle.lambda); },
       [](SimulationConfig& c, double v) { c.model.obstacle.lambda = v; }},
      {"obstacle_attraction_decay_time", [](const SimulationConfig& c) { return static_cast<double>(c.model.obstacle.attraction_decay_time); },
       [](SimulationConfig& c, double v) { c.model.obstacle.attraction_decay_time = v; }},
      {"k", [](const SimulationConfig& c) { return static_cast<double>(c.model.contact.k); },
       [](SimulationConfig& c, double v) { c.model.contact.k = v; }},
      {"kappa", [](const SimulationConfig& c) { return static_cast<double>(c.model.contact.kappa); },
       [](SimulationConfig& c, double v) { c.model.contact.kappa = v; }},
      {"tau_gain", [](const SimulationConfig& c) { return static_cast<double>(c.model.preference.tau_gain); },
       [](SimulationConfig& c, double v) { c.model.preference.tau_gain = v; }},
      {"tau_decay", [](const SimulationConfig& c) { return static_cast<double>(c.model.preference.tau_decay); },
       [](SimulationConfig& c, double v) { c.model.preference.tau_decay = v; }},
      {"tau_E", [](const SimulationConfig& c) { return static_cast<double>(c.model.preference.tau_E); },
       [](SimulationConfig& c, double v) { c.model.preference.tau_E = v; }},
      {"neighborhood_radius", [](const SimulationConfig& c) { return static_cast<double>(c.model.preference.neighborhood_radius); },
       [](SimulationConfig& c, double v) { c.model.preference.neighborhood_radius = v; }},
      {"visibility_range", [](const SimulationConfig& c) { return static_cast<double>(c.model.preference.visibility_range); },
       [](SimulationConfig& c, double v) { c.model.preference.visibility_range = v; }},
      {"waypoint_reach_radius", [](const SimulationConfig& c) { return static_cast<double>(c.model.preference.waypoint_reach_radius); },
       [](SimulationConfig& c, double v) { c.model.preference.waypoint_reach_radius = v; }},
      {"avg_speed_window", [](const SimulationConfig& c) { return static_cast<double>(c.model.preference.avg_speed_window); },
       [](SimulationConfig& c, double v) { c.model.preference.avg_speed_window = v; }},
  };
  return table;
}

bool is_integer_key(std::string_view key) { return key == "seed" || key == "output_every"; }

ordered_json to_json(Vec2 v) { return ordered_json::array({v.x, v.y}); }

ordered_json to_json(const ValueRange& r) {
  if (r.lo == r.hi) return r.lo;
  return ordered_json::array({r.lo, r.hi});
}

ordered_json to_json(const WallSegment& w) { return {{"a", to_json(w.a)}, {"b", to_json(w.b)}}; }

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ScenarioErrorKind kind) {
  switch (kind) {
    case ScenarioErrorKind::Syntax: return "syntax";
    case ScenarioErrorKind::UnsupportedVersion: return "unsupported_version";
    case ScenarioErrorKind::UnknownField: return "unknown_field";
    case ScenarioErrorKind::MissingField: return "missing_field";
    case ScenarioErrorKind::TypeMismatch: return "type_mismatch";
    case ScenarioErrorKind::RangeViolation: return "range_violation";
    case ScenarioErrorKind::DegenerateGeometry: return "degenerate_geometry";
    case ScenarioErrorKind::ExitOffWall: return "exit_off_wall";
    case ScenarioErrorKind::DanglingRoute: return "dangling_route";
    case ScenarioErrorKind::DuplicateId: return "duplicate_id";
    case ScenarioErrorKind::Overlap: return "overlap";
    case ScenarioErrorKind::SpawnFailure: return "spawn_failure";
    case ScenarioErrorKind::Io: return "io";
  }
  return "unknown";
}

ScenarioError::ScenarioError(ScenarioErrorKind kind, std::string path, std::size_t line, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at " + (path.empty() ? "/" : path) +
                         (line ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + detail),
      kind_(kind),
      path_(std::move(path)),
      line_(line),
      detail_(detail) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const ConfigKey& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return keys;
}

void set_config_value(SimulationConfig& cfg, std::string_view key, double value) {
  for (const ConfigKey& k : key_table()) {
    if (k.name != key) continue;
    if (is_integer_key(key) && (value < 0.0 || value != std::floor(value)))
      throw std::invalid_argument("configuration key '" + k.name + "' requires a non-negative integer");
    k.set(cfg, value);
    return;
  }
  throw std::invalid_argument("unknown configuration key '" + std::string(key) + "'");
}

double get_config_value(const SimulationConfig& cfg, std::string_view key) {
  for (const ConfigKey& k : key_table())
    if (k.name == key) return k.get(cfg);
  throw std::invalid_argument("unknown configuration key '" + std::string(key) + "'");
}

void ConfigOverrides::apply(SimulationConfig& cfg) const {
  if (variant) cfg.model.variant = *variant;
  // cell_size last, so an explicit value wins over the one neighbor_cutoff implies.
  for (const auto& [key, value] : values)
    if (key != "cell_size") set_config_value(cfg, key, value);
  if (auto it = values.find("cell_size"); it != values.end()) set_config_value(cfg, "cell_size", it->second);
}

std::size_t Scenario::pedestrian_count() const {
  std::size_t n = 0;
  for (const PopulationSpec& p : population) n += p.count;
  return n;
}

std::string Scenario::identity() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_scenario(*this))));
  return (name.empty() ? std::string("unnamed") : name) + "#" + buf;
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Byte offset -> line.
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
    throw ScenarioError(ScenarioErrorKind::Syntax, "", line, e.what());
  }
  const LocationIndex index(text);
  const Reader r(&index);

  Scenario s;
  r.check_keys(doc, "", {"version", "name", "defaults", "geometry", "exits", "routes", "population"});
  if (doc.contains("version")) {
    s.version = static_cast<int>(r.unsigned_integer(doc["version"], "/version"));
    if (s.version != 1) r.fail(ScenarioErrorKind::UnsupportedVersion, "/version", "only version 1 is supported");
  }
  if (doc.contains("name")) s.name = r.string(doc["name"], "/name");

  if (doc.contains("defaults")) {
    const json& d = doc["defaults"];
    r.expect_object(d, "/defaults");
    for (auto it = d.begin(); it != d.end(); ++it) {
      const std::string path = "/defaults/" + it.key();
      if (it.key() == "variant") {
        try {
          s.defaults.variant = parse_variant(r.string(it.value(), path));
        } catch (const std::invalid_argument& e) {
          r.fail(ScenarioErrorKind::RangeViolation, path, e.what());
        }
        continue;
      }
      if (std::find(config_keys().begin(), config_keys().end(), it.key()) == config_keys().end())
        r.fail(ScenarioErrorKind::UnknownField, path, "unknown configuration key '" + it.key() + "'");
      const double v = r.number(it.value(), path);
      if (is_integer_key(it.key()) && (v < 0.0 || v != std::floor(v)))
        r.fail(ScenarioErrorKind::TypeMismatch, path, "expected a non-negative integer");
      s.defaults.values[it.key()] = v;
    }
    SimulationConfig probe;
    try {
      s.defaults.apply(probe);
      probe.validate();
    } catch (const std::invalid_argument& e) {
      r.fail(ScenarioErrorKind::RangeViolation, "/defaults", e.what());
    }
  }

  if (doc.contains("geometry")) {
    const json& g = doc["geometry"];
    r.check_keys(g, "/geometry", {"walls", "attractors"});
    for (const auto& [key, attractive] : {std::pair{"walls", false}, std::pair{"attractors", true}}) {
      if (!g.contains(key)) continue;
      const std::string base = std::string("/geometry/") + key;
      if (!g[key].is_array()) r.fail(ScenarioErrorKind::TypeMismatch, base, "expected an array");
      auto& target = attractive ? s.env.attractors : s.env.walls;
      for (std::size_t k = 0; k < g[key].size(); ++k)
        target.push_back(r.segment(g[key][k], base + "/" + std::to_string(k), attractive, {"a", "b"}));
    }
  }

  if (doc.contains("exits")) {
    if (!doc["exits"].is_array()) r.fail(ScenarioErrorKind::TypeMismatch, "/exits", "expected an array");
    for (std::size_t k = 0; k < doc["exits"].size(); ++k) {
      const std::string path = "/exits/" + std::to_string(k);
      const json& e = doc["exits"][k];
      Exit exit;
      exit.segment = r.segment(e, path, false, {"id", "a", "b"});
      exit.id = r.string(r.require(e, path, "id"), path + "/id");
      s.env.exits.push_back(std::move(exit));
    }
  }

  if (doc.contains("routes")) {
    const json& routes = doc["routes"];
    r.expect_object(routes, "/routes");
    for (auto it = routes.begin(); it != routes.end(); ++it) {
      const std::string path = "/routes/" + it.key();
      if (!it.value().is_array()) r.fail(ScenarioErrorKind::TypeMismatch, path, "expected an array of points");
      std::vector<Vec2> pts;
      for (std::size_t k = 0; k < it.value().size(); ++k) pts.push_back(r.vec2(it.value()[k], path + "/" + std::to_string(k)));
      s.routes[it.key()] = std::move(pts);
    }
  }

  if (doc.contains("population")) {
    if (!doc["population"].is_array()) r.fail(ScenarioErrorKind::TypeMismatch, "/population", "expected an array");
    PedestrianId next_id = 0;
    for (std::size_t k = 0; k < doc["population"].size(); ++k) {
      PopulationSpec p = read_population_entry(r, doc["population"][k], "/population/" + std::to_string(k), next_id);
      next_id = std::max<PedestrianId>(next_id, p.id + static_cast<PedestrianId>(p.count));
      s.population.push_back(std::move(p));
    }
  }

  check_scenario(s, r);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioErrorKind::Io, "", 0, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& s) {
  const Reader r(nullptr);
  check_scenario(s, r);
}

std::string serialize_scenario(const Scenario& s) {
  ordered_json doc;
  doc["version"] = s.version;
  doc["name"] = s.name;
  ordered_json defaults = ordered_json::object();
  if (s.defaults.variant) defaults["variant"] = std::string(to_string(*s.defaults.variant));
  for (const auto& [key, value] : s.defaults.values) {
    if (is_integer_key(key))
      defaults[key] = static_cast<std::uint64_t>(value);
    else
      defaults[key] = value;
  }
  doc["defaults"] = defaults;
  ordered_json walls = ordered_json::array();
  for (const WallSegment& w : s.env.walls) walls.push_back(to_json(w));
  ordered_json attractors = ordered_json::array();
  for (const WallSegment& w : s.env.attractors) attractors.push_back(to_json(w));
  doc["geometry"] = {{"walls", walls}, {"attractors", attractors}};
  ordered_json exits = ordered_json::array();
  for (const Exit& e : s.env.exits) exits.push_back({{"id", e.id}, {"a", to_json(e.segment.a)}, {"b", to_json(e.segment.b)}});
  doc["exits"] = exits;
  ordered_json routes = ordered_json::object();
  for (const auto& [name, pts] : s.routes) {
    ordered_json arr = ordered_json::array();
    for (Vec2 p : pts) arr.push_back(to_json(p));
    routes[name] = arr;
  }
  doc["routes"] = routes;
  ordered_json population = ordered_json::array();
  for (const PopulationSpec& p : s.population) {
    ordered_json e;
    if (p.is_group()) {
      e["id_start"] = p.id;
      e["count"] = p.count;
      e["region"] = {{"min", to_json(p.region->min)}, {"max", to_json(p.region->max)}};
    } else {
      e["id"] = p.id;
      e["position"] = to_json(*p.position);
      e["velocity"] = to_json(p.velocity);
    }
    e["radius"] = to_json(p.radius);
    e["mass"] = to_json(p.mass);
    e["v0"] = to_json(p.v0);
    if (p.v_max) e["v_max"] = *p.v_max;
    e["tau"] = p.tau;
    if (p.deadline) e["deadline"] = *p.deadline;
    e["p"] = p.p;
    e["M"] = p.M;
    e["E"] = p.E;
    e["E_m"] = p.E_m;
    e["D"] = p.D;
    e["f"] = p.f;
    if (p.route) e["route"] = *p.route;
    if (p.route_target) e["route_target"] = to_json(*p.route_target);
    population.push_back(e);
  }
  doc["population"] = population;
  return doc.dump(2) + "\n";
}

SimulationConfig effective_config(const Scenario& s) {
  SimulationConfig cfg;
  s.defaults.apply(cfg);
  return cfg;
}

World build_world(const Scenario& s, std::uint64_t seed) {
  validate_scenario(s);
  World world;
  world.env = s.env;

  auto make_state = [&](const PopulationSpec& spec, PedestrianId id, Vec2 pos, double radius, double mass,
                        double v0) {
    PedestrianState st;
    st.id = id;
    st.pos = pos;
    st.vel = spec.velocity;
    st.radius = radius;
    st.mass = mass;
    st.tau = spec.tau;
    st.v0_initial = v0;
    st.v_max = spec.v_max ? *spec.v_max : 2.0 * v0;
    st.deadline = spec.deadline;
    if (spec.route) {
      st.waypoints = s.routes.at(*spec.route);
    } else {
      st.waypoints = {s.env.exits[static_cast<std::size_t>(s.env.nearest_exit(pos))].segment.midpoint()};
    }
    st.waypoint_index = 0;
    st.leg_origin = pos;
    st.p = spec.p;
    st.M = spec.M;
    st.E = spec.E;
    st.E_m = spec.E_m;
    st.D = spec.D;
    st.f = spec.f;
    st.route_target = spec.route_target;
    st.avg_speed = v0 * (1.0 - spec.p);
    st.last_direction = preferred_direction_waypoint(st);
    return st;
  };

  for (const PopulationSpec& spec : s.population) {
    if (spec.is_group()) continue;
    world.peds.push_back(make_state(spec, spec.id, *spec.position, spec.radius.lo, spec.mass.lo, spec.v0.lo));
  }

  const std::uint64_t key = splitmix64(seed ^ kSpawnKeySalt);
  for (std::size_t g = 0; g < s.population.size(); ++g) {
    const PopulationSpec& spec = s.population[g];
    if (!spec.is_group()) continue;
    CounterRng rng(key, g);
    for (std::size_t n = 0; n < spec.count; ++n) {
      const PedestrianId id = spec.id + static_cast<PedestrianId>(n);
      const double radius = rng.uniform(spec.radius.lo, spec.radius.hi);
      const double mass = rng.uniform(spec.mass.lo, spec.mass.hi);
      const double v0 = rng.uniform(spec.v0.lo, spec.v0.hi);
      const SpawnRegion& reg = *spec.region;
      bool placed = false;
      for (int attempt = 0; attempt < kMaxSpawnAttempts && !placed; ++attempt) {
        const Vec2 pos{rng.uniform(reg.min.x + radius, reg.max.x - radius),
                       rng.uniform(reg.min.y + radius, reg.max.y - radius)};
        if (reg.max.x - reg.min.x < 2 * radius || reg.max.y - reg.min.y < 2 * radius) break;
        const bool clear_of_peds = std::none_of(world.peds.begin(), world.peds.end(), [&](const PedestrianState& o) {
          return norm(o.pos - pos) < o.radius + radius;
        });
        const bool clear_of_walls = std::none_of(s.env.walls.begin(), s.env.walls.end(), [&](const WallSegment& w) {
          return point_segment_distance(pos, w.a, w.b) < radius;
        });
        if (clear_of_peds && clear_of_walls) {
          world.peds.push_back(make_state(spec, id, pos, radius, mass, v0));
          placed = true;
        }
      }
      if (!placed)
        throw ScenarioError(ScenarioErrorKind::SpawnFailure, "/population/" + std::to_string(g), 0,
                            "could not place pedestrian " + std::to_string(id) + " without overlap after " +
                                std::to_string(kMaxSpawnAttempts) + " attempts");
    }
  }
  std::sort(world.peds.begin(), world.peds.end(),
            [](const PedestrianState& a, const PedestrianState& b) { return a.id < b.id; });
  return world;
}

}  // namespace sfm
