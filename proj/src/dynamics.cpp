#include "sfm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sfm/geometry.hpp"
#include "sfm/rng.hpp"

namespace sfm {

namespace {

constexpr std::uint64_t kNoiseKeySalt = 0x6E6F697365ull;  // "noise"

struct AgentEval {
  StepForces forces;
  Vec2 pref_direction;
  bool door_visible = false;
};

/// Neighbor indices within `radius` of pedestrian i by direct scan, ascending.
void scan_neighbors(const World& world, std::size_t i, double radius, std::vector<std::size_t>& out) {
  out.clear();
  const double r2 = radius * radius;
  const Vec2 c = world.peds[i].pos;
  for (std::size_t j = 0; j < world.peds.size(); ++j) {
    if (j == i || world.peds[j].evacuated) continue;
    if (norm_squared(world.peds[j].pos - c) <= r2) out.push_back(j);
  }
}

double query_radius(const SimulationConfig& cfg) {
  return std::max(cfg.neighbor_cutoff, cfg.model.preference.neighborhood_radius);
}

AgentEval evaluate_agent(std::size_t i, const World& world, const SimulationConfig& cfg,
                         const std::vector<std::size_t>& candidates,
                         std::vector<const PedestrianState*>& scratch) {
  const ModelConfig& model = cfg.model;
  const PedestrianState& self = world.peds[i];
  AgentEval out;
  StepForces& f = out.forces;

  const double cutoff2 = cfg.neighbor_cutoff * cfg.neighbor_cutoff;
  const double rc = model.preference.neighborhood_radius;
  const double rc2 = rc * rc;
  scratch.clear();
  for (std::size_t j : candidates) {
    const PedestrianState& other = world.peds[j];
    const double d2 = norm_squared(self.pos - other.pos);
    if (d2 <= cutoff2) {
      const PairForces pf = pair_forces(self, other, model, world.time);
      f.social_rep += pf.social_rep;
      f.social_att += pf.social_att;
      f.pushing += pf.pushing;
      f.friction += pf.friction;
    }
    if (d2 <= rc2) scratch.push_back(&other);
  }

  for (const WallSegment& wall : world.env.walls) {
    const InteractionGeometry g = wall_geometry_or_fallback(self, wall);
    f.social_rep += social_repulsion(g, model.obstacle);
    f.pushing += pushing_force(g, model.contact);
    f.friction += wall_friction_force(g, model.contact);
  }
  const std::size_t n_attr = world.env.attractors.size();
  for (std::size_t a = 0; a < n_attr; ++a) {
    const double seen = world.attractor_first_seen.empty()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : world.attractor_first_seen[i * n_attr + a];
    if (std::isnan(seen)) continue;
    const InteractionGeometry g = wall_geometry_or_fallback(self, world.env.attractors[a]);
    f.social_att += social_attraction(g, model.obstacle, world.time - seen);
  }

  Vec2 door_dir = self.last_direction;
  const int exit_index = world.env.nearest_exit(self.pos);
  if (exit_index >= 0) {
    const Vec2 mid = world.env.exits[static_cast<std::size_t>(exit_index)].segment.midpoint();
    const double dist = norm(mid - self.pos);
    door_dir = normalized_or(mid - self.pos, self.last_direction);
    out.door_visible = dist <= model.preference.visibility_range && world.env.line_of_sight(self.pos, mid);
  }

  const NeighborSummary nbrs = summarize_neighbors(self, scratch, rc);
  const PreferredMotion pm = evaluate_preferred(model.variant, self, nbrs, door_dir, world.time);
  out.pref_direction = pm.direction;
  f.preferred = preferred_force(self, pm.velocity);

  if (cfg.noise_amplitude > 0.0) {
    const std::uint64_t stream = (static_cast<std::uint64_t>(self.id) << 32) | (world.step & 0xFFFFFFFFull);
    CounterRng rng(splitmix64(cfg.seed ^ kNoiseKeySalt), stream);
    f.noise.x = cfg.noise_amplitude * rng.normal();
    f.noise.y = cfg.noise_amplitude * rng.normal();
  }
  return out;
}

void check_finite(const PedestrianState& s, const StepForces& f, std::uint64_t step) {
  const std::pair<const char*, Vec2> parts[] = {{"preferred", f.preferred}, {"social_rep", f.social_rep},
                                                {"social_att", f.social_att}, {"pushing", f.pushing},
                                                {"friction", f.friction},   {"noise", f.noise}};
  for (const auto& [name, v] : parts)
    if (!is_finite(v)) throw NumericalError(s.id, name, step);
}

/// Shared step body. `grid` may be null (direct neighbor scan).
StepReport advance(World& world, const SimulationConfig& cfg, const NeighborGrid* grid, WorkerPool* pool) {
  const std::size_t n = world.peds.size();
  const std::size_t n_attr = world.env.attractors.size();
  const ModelConfig& model = cfg.model;
  StepReport report;
  report.forces.assign(n, StepForces{});

  if (n_attr > 0) {
    if (world.attractor_first_seen.size() != n * n_attr)
      world.attractor_first_seen.assign(n * n_attr, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
      if (world.peds[i].evacuated) continue;
      for (std::size_t a = 0; a < n_attr; ++a) {
        double& seen = world.attractor_first_seen[i * n_attr + a];
        if (!std::isnan(seen)) continue;
        const WallSegment& att = world.env.attractors[a];
        if (point_segment_distance(world.peds[i].pos, att.a, att.b) <= model.preference.visibility_range)
          seen = world.time;
      }
    }
  }

  // Read phase: every evaluation sees the same frozen snapshot.
  std::vector<AgentEval> evals(n);
  const double radius = query_radius(cfg);
  const World& frozen = world;
  auto evaluate_range = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> candidates;
    std::vector<const PedestrianState*> scratch;
    for (std::size_t i = begin; i < end; ++i) {
      if (frozen.peds[i].evacuated) continue;
      if (grid)
        grid->query(frozen.peds[i].pos, radius, i, candidates);
      else
        scan_neighbors(frozen, i, radius, candidates);
      evals[i] = evaluate_agent(i, frozen, cfg, candidates, scratch);
    }
  };
  if (pool)
    pool->parallel_for(n, evaluate_range);
  else
    evaluate_range(0, n);

  for (std::size_t i = 0; i < n; ++i)
    if (!world.peds[i].evacuated) check_finite(world.peds[i], evals[i].forces, world.step);

  // Write phase.
  const double dt = cfg.dt;
  const double t_next = static_cast<double>(world.step + 1) * dt;
  for (std::size_t i = 0; i < n; ++i) {
    PedestrianState& s = world.peds[i];
    if (s.evacuated) continue;
    const AgentEval& ev = evals[i];
    report.forces[i] = ev.forces;
    const Vec2 old_pos = s.pos;
    s.vel += ev.forces.total() * (dt / s.mass);
    s.pos += s.vel * dt;
    if (!is_finite(s.vel) || !is_finite(s.pos)) throw NumericalError(s.id, "state", world.step);
    report.contact_impulse += (norm(ev.forces.pushing) + norm(ev.forces.friction)) * dt;

    if (cfg.check_tunneling) {
      for (const WallSegment& w : world.env.walls)
        if (segments_intersect(old_pos, s.pos, w.a, w.b)) throw NumericalError(s.id, "tunneling", world.step);
    }
    for (const Exit& e : world.env.exits) {
      if (segments_intersect(old_pos, s.pos, e.segment.a, e.segment.b)) {
        s.evacuated = true;
        report.exits.push_back({s.id, e.id, t_next});
        break;
      }
    }
    if (s.evacuated) continue;

    s.last_direction = ev.pref_direction;
    s.avg_speed = update_avg_speed(s.avg_speed, s.vel, ev.pref_direction, dt, model.preference.avg_speed_window);
    switch (model.variant) {
      case Variant::Hmfv:
        s.p = nervousness(s);
        break;
      case Variant::Lkf:
      case Variant::Familiarity:
        s.M = update_memory(s.M, ev.door_visible, dt, model.preference.tau_gain, model.preference.tau_decay);
        s.E = update_excitement(s.E, s.avg_speed, s.v0_initial, s.E_m, dt, model.preference.tau_E);
        break;
      case Variant::Original:
        break;
    }
    advance_waypoint(s, model.preference.waypoint_reach_radius);
  }
  ++world.step;
  world.time = t_next;
  return report;
}

std::vector<std::uint8_t> active_mask(const World& world) {
  std::vector<std::uint8_t> mask(world.peds.size());
  for (std::size_t i = 0; i < world.peds.size(); ++i) mask[i] = !world.peds[i].evacuated;
  return mask;
}

}  // namespace

void ModelConfig::validate() const {
  social.validate();
  obstacle.validate();
  contact.validate();
  preference.validate();
}

void SimulationConfig::validate() const {
  auto fail = [](const char* name) {
    throw std::invalid_argument(std::string("simulation parameter out of range: ") + name);
  };
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt");
  if (!(duration >= 0.0) || !std::isfinite(duration)) fail("duration");
  if (!(noise_amplitude >= 0.0) || !std::isfinite(noise_amplitude)) fail("noise_amplitude");
  if (!(cell_size > 0.0)) fail("cell_size");
  if (!(neighbor_cutoff >= cell_size)) fail("neighbor_cutoff");
  if (output_every == 0) fail("output_every");
  if (workers == 0) fail("workers");
  model.validate();
}

NumericalError::NumericalError(PedestrianId id, std::string component, std::uint64_t step)
    : std::runtime_error("numerical failure at step " + std::to_string(step) + ": pedestrian " +
                         std::to_string(id) + ", " + component + " is not finite" +
                         (component == "tunneling" ? " (crossed a wall)" : "")),
      id_(id),
      component_(std::move(component)),
      step_(step) {}

std::size_t World::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(peds.begin(), peds.end(), [](const PedestrianState& s) { return !s.evacuated; }));
}

PairForces pair_forces(const PedestrianState& i, const PedestrianState& j, const ModelConfig& model,
                       double interest_age) {
  const InteractionGeometry g = ped_pair_geometry_or_fallback(i, j);
  return {social_repulsion(g, model.social), social_attraction(g, model.social, interest_age),
          pushing_force(g, model.contact), friction_force(g, model.contact)};
}

StepForces total_force(std::size_t i, const World& world, const SimulationConfig& cfg) {
  std::vector<std::size_t> candidates;
  std::vector<const PedestrianState*> scratch;
  scan_neighbors(world, i, query_radius(cfg), candidates);
  return evaluate_agent(i, world, cfg, candidates, scratch).forces;
}

StepReport step(World& world, const SimulationConfig& cfg) { return advance(world, cfg, nullptr, nullptr); }

Frame capture_frame(const World& world, const std::vector<StepForces>* forces) {
  Frame frame;
  frame.step = world.step;
  frame.time = world.time;
  for (std::size_t i = 0; i < world.peds.size(); ++i) {
    const PedestrianState& s = world.peds[i];
    if (s.evacuated) continue;
    AgentRecord r{s.id, s.pos, s.vel, s.p, s.M, s.E, s.E_m, s.D, s.f, {}};
    if (forces) r.forces = (*forces)[i];
    frame.agents.push_back(r);
  }
  return frame;
}

Simulation::Simulation(World world, SimulationConfig cfg)
    : world_(std::move(world)), cfg_(cfg), grid_(cfg.cell_size) {
  cfg_.validate();
  std::stable_sort(world_.peds.begin(), world_.peds.end(),
                   [](const PedestrianState& a, const PedestrianState& b) { return a.id < b.id; });
  if (cfg_.workers > 1) pool_ = std::make_unique<WorkerPool>(cfg_.workers);
}

StepReport Simulation::step() {
  std::vector<Vec2> positions(world_.peds.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = world_.peds[i].pos;
  grid_.rebuild(positions, active_mask(world_));
  return advance(world_, cfg_, &grid_, pool_.get());
}

bool Simulation::finished() const { return world_.active_count() == 0; }

TrajectoryLog Simulation::run() {
  TrajectoryLog log;
  log.population = world_.peds.size();
  log.frames.push_back(capture_frame(world_, nullptr));
  const auto total_steps = static_cast<std::uint64_t>(std::llround(cfg_.duration / cfg_.dt));
  std::uint64_t last_logged = world_.step;
  StepReport report;
  while (world_.step < total_steps && !finished()) {
    report = step();
    log.contact_impulse += report.contact_impulse;
    log.exits.insert(log.exits.end(), report.exits.begin(), report.exits.end());
    if (world_.step % cfg_.output_every == 0) {
      log.frames.push_back(capture_frame(world_, &report.forces));
      last_logged = world_.step;
    }
  }
  if (last_logged != world_.step) log.frames.push_back(capture_frame(world_, &report.forces));
  log.steps = world_.step;
  log.end_time = world_.time;
  log.all_evacuated = finished();
  return log;
}

TrajectoryLog run(World world, const SimulationConfig& cfg) {
  Simulation sim(std::move(world), cfg);
  return sim.run();
}

}  // namespace sfm
