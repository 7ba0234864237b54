#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfm/contact_forces.hpp"
#include "sfm/environment.hpp"
#include "sfm/neighbor_grid.hpp"
#include "sfm/pedestrian.hpp"
#include "sfm/preferred_velocity.hpp"
#include "sfm/social_forces.hpp"
#include "sfm/trajectory.hpp"
#include "sfm/worker_pool.hpp"

namespace sfm {

/// Every force and model parameter plus the variant selector.
struct ModelConfig {
  Variant variant = Variant::Original;
  /// Pedestrian-pedestrian psychological interaction.
  SocialForceParams social;
  /// Pedestrian-object interaction (walls repel, attractors attract).
  SocialForceParams obstacle{.A_r = 2000.0, .B_r = 0.08, .A_att = 500.0, .B_att = 0.08};
  ContactParams contact;
  PreferenceParams preference;

  void validate() const;
};

struct SimulationConfig {
  double dt = 0.01;
  double duration = 60.0;
  std::uint64_t seed = 1;
  /// Standard deviation (N) of each component of the fluctuation force.
  double noise_amplitude = 0.0;
  double neighbor_cutoff = 3.0;
  double cell_size = 3.0;
  /// Log a frame every this many steps (the final state is always logged).
  std::uint64_t output_every = 10;
  std::size_t workers = 1;
  /// Abort when a pedestrian center crosses a wall within one step.
  bool check_tunneling = false;
  ModelConfig model;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Non-finite force or state, or a wall crossing under check_tunneling.
class NumericalError : public std::runtime_error {
public:
  NumericalError(PedestrianId id, std::string component, std::uint64_t step);

  PedestrianId id() const { return id_; }
  const std::string& component() const { return component_; }
  std::uint64_t step() const { return step_; }

private:
  PedestrianId id_;
  std::string component_;
  std::uint64_t step_;
};

/// Mutable simulation state.
struct World {
  Environment env;
  std::vector<PedestrianState> peds;
  double time = 0.0;
  std::uint64_t step = 0;
  /// First perception time per (pedestrian, attractor), row-major; NaN if never.
  std::vector<double> attractor_first_seen;

  std::size_t active_count() const;
};

/// Contributions of pedestrian j on pedestrian i.
struct PairForces {
  Vec2 social_rep;
  Vec2 social_att;
  Vec2 pushing;
  Vec2 friction;
};

PairForces pair_forces(const PedestrianState& i, const PedestrianState& j, const ModelConfig& model,
                       double interest_age);

struct StepReport {
  /// Indexed like World::peds; zero for pedestrians inactive during the step.
  std::vector<StepForces> forces;
  std::vector<ExitEvent> exits;
  double contact_impulse = 0.0;
};

/// Force decomposition on pedestrian i from the current (frozen) world, with
/// neighbors found by direct scan.
StepForces total_force(std::size_t i, const World& world, const SimulationConfig& cfg);

/// Advances `world` by one step (single-threaded convenience form).
StepReport step(World& world, const SimulationConfig& cfg);

/// Stepper owning the neighbor grid and worker pool for a run.
class Simulation {
public:
  Simulation(World world, SimulationConfig cfg);

  const World& world() const { return world_; }
  const SimulationConfig& config() const { return cfg_; }
  StepReport step();
  /// True once no pedestrian is left inside.
  bool finished() const;
  /// Steps until `duration` or full evacuation.
  TrajectoryLog run();

private:
  World world_;
  SimulationConfig cfg_;
  NeighborGrid grid_;
  std::unique_ptr<WorkerPool> pool_;
};

/// Runs a fresh simulation of `world` and returns its log.
TrajectoryLog run(World world, const SimulationConfig& cfg);

/// Snapshot of the active pedestrians.
Frame capture_frame(const World& world, const std::vector<StepForces>* forces);

}  // namespace sfm
