#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sfm/social_forces.hpp"

using namespace sfm;

namespace {

constexpr double kTwoThousandOverE = 735.758882342884643191;
constexpr double kFiveHundredOverE = 183.939720585721160798;

InteractionGeometry geom(double R, double d, double phi = 0.0, Vec2 n = {1.0, 0.0}) {
  InteractionGeometry g;
  g.R = R;
  g.d = d;
  g.n = n;
  g.t = rotate90(n);
  g.phi = phi;
  return g;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("perception weight") {
  CHECK(perception_weight(0.0, 0.2) == 1.0);
  CHECK(perception_weight(std::numbers::pi, 0.2) == 0.2);
  CHECK(rel_err(perception_weight(std::numbers::pi / 2, 0.2), 0.6) < 1e-9);
  double prev = 2.0;
  for (int k = 0; k <= 100; ++k) {
    const double w = perception_weight(std::numbers::pi * k / 100.0, 0.3);
    CHECK(w <= prev);
    CHECK(w >= 0.3);
    prev = w;
  }
}

TEST_CASE("social repulsion") {
  SocialForceParams p;
  p.lambda = 1.0;
  CHECK(norm(social_repulsion(geom(0.6, 0.6), p)) == doctest::Approx(2000.0).epsilon(1e-15));
  const Vec2 f = social_repulsion(geom(0.6, 0.68), p);
  CHECK(rel_err(f.x, kTwoThousandOverE) < 1e-9);
  CHECK(f.y == 0.0);
  CHECK(norm(social_repulsion(geom(0.6, 10.0), p)) < 1e-40 * p.A_r);

  SUBCASE("strictly decreasing in distance") {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100; ++k) {
      const double m = norm(social_repulsion(geom(0.6, 0.1 + 0.02 * k), p));
      CHECK(m < prev);
      CHECK(m > 0.0);
      prev = m;
    }
  }
  SUBCASE("weighted by view angle") {
    SocialForceParams q;  // lambda = 0.2
    CHECK(norm(social_repulsion(geom(0.6, 0.6, std::numbers::pi / 2), q)) ==
          doctest::Approx(2000.0 * 0.6).epsilon(1e-12));
  }
  SUBCASE("isotropic limit") {
    const double m0 = norm(social_repulsion(geom(0.6, 0.7, 0.0), p));
    for (double phi : {0.5, 1.0, 2.0, std::numbers::pi}) CHECK(norm(social_repulsion(geom(0.6, 0.7, phi), p)) == m0);
  }
  SUBCASE("points along n") {
    const Vec2 n = normalized_or(Vec2{-1.0, 2.0}, Vec2{});
    CHECK(dot(social_repulsion(geom(0.6, 1.0, 0.3, n), p), n) > 0.0);
  }
}

TEST_CASE("social attraction") {
  SocialForceParams p;
  CHECK(social_attraction(geom(0.6, 0.5), p, 0.0) == Vec2{});  // A_att = 0

  p.A_att = 500.0;
  p.B_att = 0.08;
  p.lambda = 1.0;
  const Vec2 f = social_attraction(geom(0.3, 0.38), p, 0.0);
  CHECK(rel_err(-f.x, kFiveHundredOverE) < 1e-9);
  CHECK(f.x < 0.0);  // toward the source (along -n)
  CHECK(norm(social_attraction(geom(0.3, 0.38), p, 1e4)) < 1e-300);
  CHECK(norm(social_attraction(geom(0.3, 0.38), p, 5.0)) ==
        doctest::Approx(kFiveHundredOverE * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  SocialForceParams p;
  CHECK_NOTHROW(p.validate());
  p.B_r = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.lambda = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.A_att = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
