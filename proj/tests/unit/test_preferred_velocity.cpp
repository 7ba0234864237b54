#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sfm/preferred_velocity.hpp"

using namespace sfm;

namespace {

PedestrianState walker(Vec2 pos, std::vector<Vec2> waypoints = {{5.0, 0.0}}) {
  PedestrianState s;
  s.pos = pos;
  s.waypoints = std::move(waypoints);
  s.leg_origin = pos;
  return s;
}

NeighborSummary crowd(Vec2 avg_dir, Vec2 avg_vel, double rho) {
  NeighborSummary n;
  n.avg_pref_direction = avg_dir;
  n.avg_velocity = avg_vel;
  n.collective_direction = normalized_or(avg_vel, Vec2{}, kRestSpeed);
  n.density_tilde = rho;
  n.count = 3;
  return n;
}

struct RandomStates {
  std::mt19937_64 gen{2024};
  std::uniform_real_distribution<double> coord{-10.0, 10.0};
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  Vec2 vec(double scale = 1.0) { return Vec2{coord(gen), coord(gen)} * (scale / 10.0); }
  Vec2 dir() { return normalized_or(vec(), Vec2{1.0, 0.0}); }

  PedestrianState state() {
    PedestrianState s = walker(vec(10.0), {vec(10.0), vec(10.0)});
    s.vel = vec(2.0);
    s.last_direction = dir();
    s.v0_initial = 0.5 + 1.5 * unit(gen);
    s.v_max = s.v0_initial * (1.0 + unit(gen));
    s.p = unit(gen);
    s.M = unit(gen);
    s.E_m = 1.0;
    s.E = unit(gen);
    s.D = unit(gen);
    s.f = 0.0;
    s.route_target = vec(10.0);
    return s;
  }

  NeighborSummary summary() { return crowd(vec(), vec(2.0), unit(gen)); }
};

}  // namespace

TEST_CASE("waypoint direction") {
  CHECK(preferred_direction_waypoint(walker({0.0, 0.0})) == Vec2{1.0, 0.0});
  const Vec2 d = preferred_direction_waypoint(walker({1.0, 1.0}, {{4.0, 5.0}}));
  CHECK(d.x == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(d.y == doctest::Approx(0.8).epsilon(1e-15));

  PedestrianState at_goal = walker({5.0, 0.0});
  at_goal.last_direction = {0.0, -1.0};
  CHECK(preferred_direction_waypoint(at_goal) == Vec2{0.0, -1.0});

  PedestrianState on_intermediate = walker({2.0, 0.0}, {{2.0, 0.0}, {2.0, 3.0}});
  CHECK(preferred_direction_waypoint(on_intermediate) == Vec2{0.0, 1.0});
}

TEST_CASE("waypoint advancement") {
  PedestrianState s = walker({0.0, 0.0}, {{5.0, 0.0}, {5.0, 5.0}, {0.0, 5.0}});
  CHECK_FALSE(advance_waypoint(s, 0.5));
  s.pos = {4.6, 0.0};
  CHECK(advance_waypoint(s, 0.5));
  CHECK(s.waypoint_index == 1);
  CHECK(s.leg_origin == Vec2{5.0, 0.0});
  s.pos = {3.0, 5.2};  // overshot the corner: half-plane crossed
  CHECK(advance_waypoint(s, 0.5));
  CHECK(s.waypoint_index == 2);
  s.pos = {-3.0, 5.0};  // past the final waypoint: never skipped
  CHECK_FALSE(advance_waypoint(s, 0.5));
  CHECK(s.waypoint_index == 2);
}

TEST_CASE("original preferred speed") {
  PedestrianState s = walker({0.0, 0.0}, {{10.0, 0.0}});
  CHECK(preferred_speed_original(s, 0.0) == s.v0_initial);
  s.deadline = 20.0;
  CHECK(preferred_speed_original(s, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  s.pos = {10.0, 0.0};
  CHECK(preferred_speed_original(s, 0.0) == 0.0);
  s = walker({0.0, 0.0}, {{100.0, 0.0}});
  s.deadline = 1.0;
  s.v_max = 3.0;
  CHECK(preferred_speed_original(s, 0.0) == 3.0);
  CHECK(preferred_speed_original(s, 50.0) == 3.0);  // past the deadline stays finite
  s = walker({0.0, 0.0}, {{3.0, 0.0}, {3.0, 4.0}});
  CHECK(remaining_path_length(s) == 7.0);
}

TEST_CASE("nervousness") {
  PedestrianState s;
  s.v0_initial = 1.0;
  s.avg_speed = 1.0;
  CHECK(nervousness(s) == 0.0);
  s.avg_speed = 0.0;
  CHECK(nervousness(s) == 1.0);
  s.avg_speed = 0.5;
  CHECK(nervousness(s) == 0.5);
  s.avg_speed = 3.0;
  CHECK(nervousness(s) == 0.0);
}

TEST_CASE("nervousness-weighted preferred velocity") {
  PedestrianState s = walker({0.0, 0.0});
  s.v0_initial = 1.0;
  s.v_max = 2.0;
  const NeighborSummary n = crowd({0.0, 0.5}, {0.0, 1.0}, 0.3);

  s.p = 0.0;
  SpeedDirection sd = hmfv_preferred(s, n);
  CHECK(sd.speed == 1.0);
  CHECK(sd.direction == Vec2{1.0, 0.0});

  s.p = 1.0;
  sd = hmfv_preferred(s, n);
  CHECK(sd.speed == 2.0);
  CHECK(sd.direction == Vec2{0.0, 1.0});

  s.p = 0.5;
  CHECK(hmfv_preferred(s, n).speed == 1.5);

  SUBCASE("opposite blend falls back to the last direction") {
    s.last_direction = {0.0, -1.0};
    const SpeedDirection z = hmfv_preferred(s, crowd({-1.0, 0.0}, {}, 0.0));
    CHECK(z.direction == Vec2{0.0, -1.0});
  }
}

TEST_CASE("preferred speed stays between v0 and v_max") {
  RandomStates r;
  for (int k = 0; k < 1000; ++k) {
    PedestrianState s = r.state();
    const double speed = hmfv_preferred(s, r.summary()).speed;
    CHECK(speed >= std::min(s.v0_initial, s.v_max) - 1e-12);
    CHECK(speed <= std::max(s.v0_initial, s.v_max) + 1e-12);
  }
}

TEST_CASE("memory and density direction blend") {
  PedestrianState s = walker({0.0, 0.0});
  s.vel = {0.0, 1.0};
  const NeighborSummary n = crowd({}, {-2.0, 0.0}, 0.0);
  const Vec2 door = normalized_or(Vec2{1.0, 1.0}, Vec2{});

  s.M = 1.0;
  CHECK(lkf_direction(s, n, door) == door);
  s.M = 0.0;
  CHECK(lkf_direction(s, n, door) == Vec2{0.0, 1.0});
  CHECK(lkf_direction(s, crowd({}, {-2.0, 0.0}, 1.0), door) == Vec2{-1.0, 0.0});
  s.vel = {};
  s.last_direction = {0.0, -1.0};
  CHECK(lkf_direction(s, n, door) == Vec2{0.0, -1.0});  // at rest: facing = last direction
}

TEST_CASE("familiarity direction") {
  PedestrianState s = walker({0.0, 0.0});
  s.vel = {1.0, 0.0};
  s.route_target = Vec2{0.0, 4.0};
  const NeighborSummary n = crowd({}, {}, 0.0);
  const Vec2 door{-1.0, 0.0};

  s.f = 1.0;
  s.M = 0.0;
  CHECK(familiarity_direction(s, n, door) == Vec2{0.0, 1.0});
  s.f = 0.5;
  const Vec2 half = familiarity_direction(s, n, door);
  CHECK(half.x == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(half.y == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("reduction identities over random states") {
  RandomStates r;
  for (int k = 0; k < 1000; ++k) {
    PedestrianState s = r.state();
    const NeighborSummary n = r.summary();
    const Vec2 door = r.dir();

    s.f = 0.0;
    const Vec2 fam = familiarity_direction(s, n, door);
    const Vec2 lkf = lkf_direction(s, n, door);
    CHECK(fam.x == lkf.x);
    CHECK(fam.y == lkf.y);
    CHECK(evaluate_preferred(Variant::Familiarity, s, n, door, 0.0).velocity ==
          evaluate_preferred(Variant::Lkf, s, n, door, 0.0).velocity);

    s.p = 0.0;
    const PreferredMotion h = evaluate_preferred(Variant::Hmfv, s, n, door, 0.0);
    const PreferredMotion o = evaluate_preferred(Variant::Original, s, n, door, 0.0);
    CHECK(h.velocity == o.velocity);
    CHECK(h.direction == o.direction);

    PedestrianState m = s;
    m.M = 1.0;
    CHECK(lkf_direction(m, n, door) == door);

    PedestrianState d = s;
    d.D = 1.0;
    CHECK(lkf_preferred_velocity(d, n, lkf) == n.avg_velocity);

    for (Variant v : {Variant::Original, Variant::Hmfv, Variant::Lkf, Variant::Familiarity}) {
      PedestrianState any = s;
      any.f = r.unit(r.gen);
      const PreferredMotion pm = evaluate_preferred(v, any, n, door, 0.0);
      CHECK(is_finite(pm.velocity));
      CHECK(std::abs(norm(pm.direction) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("dependency and excitement velocity") {
  PedestrianState s;
  s.v0_initial = 1.0;
  const NeighborSummary n = crowd({}, {0.3, -0.4}, 0.0);
  const Vec2 dir{0.0, 1.0};
  s.D = 1.0;
  s.E = 0.9;
  CHECK(lkf_preferred_velocity(s, n, dir) == Vec2{0.3, -0.4});
  s.D = 0.0;
  s.E = 0.0;
  CHECK(lkf_preferred_velocity(s, n, dir) == Vec2{0.0, 1.0});
  s.E = 0.5;
  CHECK(norm(lkf_preferred_velocity(s, n, dir)) == 1.5);
}

TEST_CASE("memory update") {
  CHECK(update_memory(0.0, false, 0.01, 0.5, 10.0) == 0.0);
  CHECK(update_memory(1.0, true, 0.01, 0.5, 10.0) == 1.0);
  CHECK(update_memory(0.0, true, 0.01, 1.0, 10.0) == doctest::Approx(0.01).epsilon(1e-15));
  double M = 0.3;
  std::mt19937_64 gen(1);
  for (int k = 0; k < 10000; ++k) {
    M = update_memory(M, gen() % 2 == 0, 0.7, 0.5, 0.6);  // huge steps still clamp
    REQUIRE(M >= 0.0);
    REQUIRE(M <= 1.0);
  }
}

TEST_CASE("excitement update") {
  CHECK(update_excitement(0.0, 1.5, 1.5, 1.0, 0.01, 2.0) == 0.0);
  CHECK(update_excitement(1.0, 0.0, 1.5, 1.0, 0.01, 2.0) == 1.0);
  CHECK(update_excitement(0.0, 0.0, 1.0, 1.0, 0.1, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
  double E = 0.2;
  std::mt19937_64 gen(2);
  for (int k = 0; k < 10000; ++k) {
    E = update_excitement(E, static_cast<double>(gen() % 300) / 100.0, 1.5, 0.8, 5.0, 2.0);
    REQUIRE(E >= 0.0);
    REQUIRE(E <= 0.8);
  }
}

TEST_CASE("average speed estimate") {
  CHECK(update_avg_speed(1.0, {1.0, 0.0}, {1.0, 0.0}, 0.01, 2.0) == 1.0);
  CHECK(update_avg_speed(1.0, {-1.0, 0.0}, {1.0, 0.0}, 0.01, 2.0) == doctest::Approx(1.0 - 0.005));
  CHECK(update_avg_speed(1.0, {0.2, 0.0}, {1.0, 0.0}, 5.0, 2.0) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("preferred force") {
  PedestrianState s;
  s.mass = 80.0;
  s.tau = 0.5;
  s.vel = {0.5, 0.0};
  const Vec2 f = preferred_force(s, {1.5, 0.0});
  CHECK(std::abs(f.x - 160.0) / 160.0 < 1e-9);
  CHECK(f.y == 0.0);
  s.vel = {2.0, 0.0};
  CHECK(preferred_force(s, {1.0, 0.0}) == Vec2{-160.0, 0.0});
  s.vel = {0.3, -0.2};
  CHECK(preferred_force(s, s.vel) == Vec2{});

  RandomStates r;
  for (int k = 0; k < 1000; ++k) {
    PedestrianState q = r.state();
    q.vel = {};
    const Vec2 dv = r.vec(2.0);
    const double alpha = r.coord(r.gen);
    const Vec2 lhs = preferred_force(q, dv * alpha);
    const Vec2 rhs = preferred_force(q, dv) * alpha;
    CHECK(std::abs(lhs.x - rhs.x) <= 1e-12 * std::max(1.0, std::abs(rhs.x)));
    CHECK(std::abs(lhs.y - rhs.y) <= 1e-12 * std::max(1.0, std::abs(rhs.y)));
  }
}

TEST_CASE("neighbor summary") {
  PedestrianState self;
  self.radius = 0.5;
  PedestrianState a, b;
  a.last_direction = {1.0, 0.0};
  b.last_direction = {0.0, 1.0};
  a.vel = {1.0, 0.0};
  b.vel = {-1.0, 0.0};
  const std::vector<const PedestrianState*> ptrs{&a, &b};
  const NeighborSummary n = summarize_neighbors(self, ptrs, 2.0);
  CHECK(n.count == 2);
  CHECK(n.avg_pref_direction == Vec2{0.5, 0.5});
  CHECK(n.avg_velocity == Vec2{0.0, 0.0});
  CHECK(n.collective_direction == Vec2{});  // exactly zero, never NaN
  CHECK(n.density_tilde == doctest::Approx(2.0 * 0.0625));

  const NeighborSummary empty = summarize_neighbors(self, {}, 2.0);
  CHECK(empty.density_tilde == 0.0);
  CHECK(empty.collective_direction == Vec2{});

  std::vector<PedestrianState> many(40);
  std::vector<const PedestrianState*> all;
  for (auto& p : many) all.push_back(&p);
  CHECK(summarize_neighbors(self, all, 2.0).density_tilde == 1.0);
}
