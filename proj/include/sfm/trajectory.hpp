#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfm/pedestrian.hpp"
#include "sfm/vec2.hpp"

namespace sfm {

/// Per-pedestrian force decomposition (N) of one step.
struct StepForces {
  Vec2 preferred;
  Vec2 social_rep;
  Vec2 social_att;
  Vec2 pushing;
  Vec2 friction;
  Vec2 noise;

  /// The force used for integration; summed in a fixed order.
  Vec2 total() const { return preferred + social_rep + social_att + pushing + friction + noise; }
};

struct AgentRecord {
  PedestrianId id = 0;
  Vec2 pos;
  Vec2 vel;
  double p = 0.0;
  double M = 0.0;
  double E = 0.0;
  double E_m = 0.0;
  double D = 0.0;
  double f = 0.0;
  /// Forces of the step that produced this state (zero in the initial frame).
  StepForces forces;
};

struct Frame {
  std::uint64_t step = 0;
  double time = 0.0;
  /// Pedestrians still inside at this time, in ascending id order.
  std::vector<AgentRecord> agents;
};

struct ExitEvent {
  PedestrianId id = 0;
  std::string exit_id;
  double time = 0.0;
};

/// Time-indexed simulation record.
struct TrajectoryLog {
  std::vector<Frame> frames;
  std::vector<ExitEvent> exits;
  std::size_t population = 0;
  std::uint64_t steps = 0;
  double end_time = 0.0;
  bool all_evacuated = false;
  /// Sum over steps of (|f_pushing| + |f_friction|) dt over all pedestrians (N s).
  double contact_impulse = 0.0;
};

}  // namespace sfm
