#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "flowinv/scene.hpp"
#include "flowinv/scene_parser.hpp"
#include "helpers.hpp"

using namespace flowinv;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("parse_scene minimal file") {
  const Scene scene = parse_scene("camera speed=1 focal=100 width=64 height=64\npoint 1 0 1\n");
  REQUIRE(scene.points.size() == 1);
  CHECK(scene.rig.speed == 1.0);
  CHECK(scene.rig.focal == 100.0);
  CHECK(scene.points[0].id == 0);
  CHECK(scene.points[0].position0 == Vec3{1, 0, 1});
  CHECK(scene.points[0].stationary());
}

TEST_CASE("parse_scene point velocity") {
  const Scene scene =
      parse_scene("camera speed=1 focal=100 width=64 height=64\npoint 1 0 1 -0.2 0 0\n");
  CHECK(scene.points[0].velocity == Vec3{-0.2, 0, 0});
}

TEST_CASE("parse_scene validation") {
  CHECK_THROWS_AS(parse_scene("camera speed=-1 focal=100 width=64 height=64\n"), ParseError);
  CHECK_THROWS_AS(parse_scene("camera speed=1 focal=0 width=64 height=64\n"), ParseError);
  CHECK_THROWS_WITH(
      parse_scene("camera speed=1 focal=1 width=4 height=4\n"
                  "camera speed=1 focal=1 width=4 height=4\n"),
      Catch::Matchers::ContainsSubstring("line 2"));
  CHECK_THROWS_AS(parse_scene("point 1 2 3\n"), ParseError);    // camera must come first
  CHECK_THROWS_AS(parse_scene(""), ParseError);
  try {
    parse_scene("camera speed=1 focal=1 width=4 height=4\n# fine\npoint 1 two 3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("parse_scene comments and box expansion") {
  const Scene scene = parse_scene(
      "# a scene\n"
      "camera speed=2 focal=50 width=32 height=32  # trailing comment\n"
      "box 0 0 10 1 1 1 samples=2\n"
      "point 0 0 5\n");
  REQUIRE(scene.points.size() == 9);  // 8 corners + 1 point
  CHECK(scene.points[8].id == 8);
  CHECK(scene.points[8].position0 == Vec3{0, 0, 5});
}

TEST_CASE("relative_state") {
  const CameraRig rig(1.0, 100.0, 64, 64);
  ScenePoint p;
  p.position0 = {1, 0, 5};

  SECTION("stationary") {
    auto [pos, vel] = relative_state(p, rig, 2.0);
    CHECK(pos == Vec3{1, 0, 3});
    CHECK(vel == Vec3{0, 0, -1});
  }
  SECTION("moving") {
    p.position0 = {2, 0, 5};
    p.velocity = {-0.2, 0, 0};
    auto [pos, vel] = relative_state(p, rig, 1.0);
    CHECK_THAT(pos.x, WithinAbs(1.8, 1e-15));
    CHECK(pos.z == 4.0);
    CHECK(vel == Vec3{-0.2, 0, -1});
  }
  SECTION("t=0 identity") {
    auto [pos, vel] = relative_state(p, rig, 0.0);
    CHECK(pos == p.position0);
    CHECK(vel == p.velocity - Vec3{0, 0, rig.speed});
  }
}

TEST_CASE("ground_truth fixtures") {
  SECTION("(1,0,1) speed 1") {
    const CameraRig rig(1.0, 100.0, 64, 64);
    ScenePoint p;
    p.position0 = {1, 0, 1};
    const auto g = ground_truth(p, rig, 0.0);
    CHECK_THAT(g.d, WithinAbs(1.0, 1e-15));
    CHECK_THAT(g.s, WithinAbs(1.0, 1e-15));
    CHECK_THAT(g.alpha, WithinAbs(kPi / 4, 1e-15));
    CHECK_THAT(g.alpha_dot, WithinAbs(0.5, 1e-15));  // d*speed/r^2, r^2 = 2
    CHECK(g.theta == 0.0);
  }
  SECTION("(3,4,10) speed 2") {
    const CameraRig rig(2.0, 100.0, 64, 64);
    ScenePoint p;
    p.position0 = {3, 4, 10};
    const auto g = ground_truth(p, rig, 0.0);
    CHECK_THAT(g.d, WithinAbs(5.0, 1e-15));
    CHECK_THAT(g.s, WithinAbs(10.0, 1e-15));
    CHECK_THAT(g.alpha_dot, WithinAbs(0.08, 1e-15));  // 5*2/125
    CHECK_THAT(g.theta, WithinAbs(std::atan2(4.0, 3.0), 1e-15));
  }
  SECTION("moving point, general alpha_dot") {
    const CameraRig rig(1.0, 100.0, 64, 64);
    ScenePoint p;
    p.position0 = {2, 0, 5};
    p.velocity = {-0.2, 0, 0};
    const auto g = ground_truth(p, rig, 0.0);
    CHECK_THAT(g.d, WithinAbs(2.0, 1e-15));
    CHECK_THAT(g.s, WithinAbs(5.0, 1e-15));
    CHECK_THAT(g.alpha_dot, WithinAbs(1.0 / 29.0, 1e-15));
  }
}

TEST_CASE("ground_truth edge cases") {
  const CameraRig rig(1.0, 100.0, 64, 64);
  ScenePoint p;
  p.position0 = {1, 0, 1};
  CHECK_THROWS_AS(ground_truth(p, rig, 1.0), BehindCamera);   // s = 0
  CHECK_THROWS_AS(ground_truth(p, rig, 2.0), BehindCamera);

  p.position0 = {0, 0, 5};
  const auto g = ground_truth(p, rig, 0.0);
  CHECK(g.on_axis);
  CHECK(g.alpha == 0.0);
  CHECK(g.alpha_dot == 0.0);
  CHECK(g.theta == 0.0);
}

TEST_CASE("expand_box") {
  SECTION("samples=2 gives corners") {
    const auto pts = expand_box({0, 0, 0}, {1, 1, 1}, 2, {});
    CHECK(pts.size() == 8);
  }
  SECTION("samples=3 gives full shell") {
    const auto pts = expand_box({0, 0, 0}, {1, 1, 1}, 3, {});
    CHECK(pts.size() == 26);  // 3^3 minus the interior point
  }
  SECTION("velocity propagates") {
    const auto pts = expand_box({0, 0, 10}, {2, 2, 2}, 3, {0.5, 0, 0});
    for (const auto& p : pts) CHECK(p.velocity == Vec3{0.5, 0, 0});
  }
  SECTION("validation") {
    CHECK_THROWS_AS(expand_box({0, 0, 0}, {1, 1, 1}, 1, {}), BadRange);
    CHECK_THROWS_AS(expand_box({0, 0, 0}, {1, 0, 1}, 2, {}), BadRange);
  }
}

TEST_CASE("stationary d and relative depth are time-invariant") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    const CameraRig rig(testing::random_speed(rng), 100.0, 64, 64);
    auto p1 = testing::random_stationary_point(rng, 0);
    auto p2 = testing::random_stationary_point(rng, 1);
    // keep both ahead of the camera over the sampled window
    p1.position0.z += 100.0;
    p2.position0.z += 100.0;
    std::uniform_real_distribution<double> times(0.0, 5.0);
    const double t1 = times(rng), t2 = times(rng);
    const auto a1 = ground_truth(p1, rig, t1), a2 = ground_truth(p1, rig, t2);
    const auto b1 = ground_truth(p2, rig, t1), b2 = ground_truth(p2, rig, t2);
    CHECK_THAT(a2.d - a1.d, WithinAbs(0.0, 1e-12));
    CHECK_THAT((a1.s - b1.s) - (a2.s - b2.s), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("alpha_dot matches central finite difference of alpha") {
  std::mt19937_64 rng(202);
  double worst_ratio_lo = 1e9, worst_ratio_hi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CameraRig rig(testing::random_speed(rng), 100.0, 64, 64);
    auto p = testing::random_stationary_point(rng, 0);
    p.position0.z += 10.0;
    const auto g = ground_truth(p, rig, 0.0);

    auto fd_error = [&](double h) {
      const double ap = ground_truth(p, rig, h).alpha;
      const double am = ground_truth(p, rig, -h).alpha;
      return std::abs((ap - am) / (2 * h) - g.alpha_dot);
    };
    const double e1 = fd_error(1e-3);
    const double e2 = fd_error(5e-4);
    if (e2 < 1e-14) continue;  // below roundoff, ratio meaningless
    const double ratio = e1 / e2;
    worst_ratio_lo = std::min(worst_ratio_lo, ratio);
    worst_ratio_hi = std::max(worst_ratio_hi, ratio);
  }
  CHECK(worst_ratio_lo >= 3.0);
  CHECK(worst_ratio_hi <= 5.0);
}

TEST_CASE("ground_truth internal consistency over random points") {
  std::mt19937_64 rng(303);
  for (int i = 0; i < 1000; ++i) {
    const CameraRig rig(testing::random_speed(rng), 100.0, 64, 64);
    const auto p = testing::random_stationary_point(rng, i);
    const auto g = ground_truth(p, rig, 0.0);
    CHECK_THAT(g.d - g.r * std::sin(g.alpha), WithinAbs(0.0, 1e-12));
    CHECK_THAT(g.s - g.r * std::cos(g.alpha), WithinAbs(0.0, 1e-12));
    CHECK_THAT(g.r * g.r - (g.d * g.d + g.s * g.s), WithinAbs(0.0, 1e-9));
    // rate relation: speed/d = alpha_dot / sin^2(alpha)
    const double sa = std::sin(g.alpha);
    CHECK_THAT(rig.speed / g.d - g.alpha_dot / (sa * sa), WithinAbs(0.0, 1e-9));
  }
}
