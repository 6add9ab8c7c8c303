#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "flowinv/projection.hpp"
#include "helpers.hpp"

using namespace flowinv;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("project pinhole fixtures") {
  SECTION("(1,0,1), focal 100") {
    const CameraRig rig(1.0, 100.0, 256, 256);
    ScenePoint p;
    p.position0 = {1, 0, 1};
    const auto img = project(p, rig, 0.0);
    CHECK_THAT(img.u, WithinAbs(100.0, 1e-12));
    CHECK_THAT(img.v, WithinAbs(0.0, 1e-12));
    CHECK_THAT(img.rho(), WithinAbs(100.0 * std::tan(std::atan(1.0)), 1e-9));
  }
  SECTION("on-axis point lands on the FOE") {
    const CameraRig rig(1.0, 100.0, 64, 64);
    ScenePoint p;
    p.position0 = {0, 0, 5};
    const auto img = project(p, rig, 0.0);
    CHECK(img.u == 0.0);
    CHECK(img.v == 0.0);
  }
  SECTION("(3,4,10), focal 1") {
    const CameraRig rig(1.0, 1.0, 64, 64);
    ScenePoint p;
    p.position0 = {3, 4, 10};
    const auto img = project(p, rig, 0.0);
    CHECK_THAT(img.u, WithinAbs(0.3, 1e-15));
    CHECK_THAT(img.v, WithinAbs(0.4, 1e-15));
    CHECK_THAT(img.rho(), WithinAbs(0.5, 1e-15));
  }
  SECTION("behind camera") {
    const CameraRig rig(1.0, 100.0, 64, 64);
    ScenePoint p;
    p.position0 = {1, 0, 1};
    CHECK_THROWS_AS(project(p, rig, 1.5), BehindCamera);
  }
}

TEST_CASE("analytic_flow fixtures") {
  SECTION("(1,0,1), speed 1, focal 1") {
    const CameraRig rig(1.0, 1.0, 64, 64);
    ScenePoint p;
    p.position0 = {1, 0, 1};
    const auto fs = analytic_flow(p, rig, 0.0);
    CHECK_THAT(fs.rho, WithinAbs(1.0, 1e-15));
    CHECK_THAT(fs.rho_dot, WithinAbs(1.0, 1e-15));  // rho*speed/s
    CHECK(fs.quality == FlowQuality::analytic);
  }
  SECTION("(3,4,10), speed 2, focal 1") {
    const CameraRig rig(2.0, 1.0, 64, 64);
    ScenePoint p;
    p.position0 = {3, 4, 10};
    const auto fs = analytic_flow(p, rig, 0.0);
    CHECK_THAT(fs.rho, WithinAbs(0.5, 1e-15));
    CHECK_THAT(fs.rho_dot, WithinAbs(0.1, 1e-15));
  }
  SECTION("FOE point") {
    const CameraRig rig(1.0, 1.0, 64, 64);
    ScenePoint p;
    p.position0 = {0, 0, 5};
    const auto fs = analytic_flow(p, rig, 0.0);
    CHECK(fs.rho == 0.0);
    CHECK(fs.rho_dot == 0.0);
  }
}

TEST_CASE("analytic rho_dot agrees with closed form for stationary points") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const CameraRig rig(testing::random_speed(rng), 100.0, 64, 64);
    const auto p = testing::random_stationary_point(rng, i);
    const auto fs = analytic_flow(p, rig, 0.0);
    const auto g = ground_truth(p, rig, 0.0);
    // chain-rule form vs rho*speed/s
    CHECK_THAT(fs.rho_dot, WithinRel(fs.rho * rig.speed / g.s, 1e-12));
    // projection consistency: rho/f = tan(alpha)
    CHECK_THAT(fs.rho / rig.focal, WithinRel(std::tan(g.alpha), 1e-12));
  }
}

TEST_CASE("radial motion of stationary points") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 200; ++i) {
    const CameraRig rig(testing::random_speed(rng), 100.0, 64, 64);
    auto p = testing::random_stationary_point(rng, i);
    p.position0.z += 30.0;
    const auto f0 = analytic_flow(p, rig, 0.0);
    const auto f1 = analytic_flow(p, rig, 2.0);
    CHECK_THAT(f1.theta - f0.theta, WithinAbs(0.0, 1e-12));
    CHECK(f0.rho_dot >= 0.0);
    CHECK(f1.rho_dot >= 0.0);
    CHECK(f1.rho >= f0.rho);  // expansion away from the FOE
  }
}

TEST_CASE("finite_diff_flow") {
  const CameraRig rig(1.0, 100.0, 2048, 2048);
  ScenePoint p;
  p.position0 = {2, 1, 8};

  SECTION("converges to analytic flow at O(dt^2)") {
    auto rho_dot_error = [&](double dt) {
      const auto a = project(p, rig, 1.0 - dt / 2);
      const auto b = project(p, rig, 1.0 + dt / 2);
      const auto fd = finite_diff_flow(a, b);
      const auto exact = analytic_flow(p, rig, 1.0);
      REQUIRE_THAT(fd.t, WithinAbs(1.0, 1e-15));
      return std::abs(fd.rho_dot - exact.rho_dot);
    };
    const double e1 = rho_dot_error(1e-2);
    const double e2 = rho_dot_error(5e-3);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
  }
  SECTION("identical endpoints give zero rate") {
    const auto a = project(p, rig, 0.0);
    ImagePoint b = a;
    b.t = 1.0;
    CHECK(finite_diff_flow(a, b).rho_dot == 0.0);
  }
  SECTION("mismatched ids rejected") {
    auto a = project(p, rig, 0.0);
    auto b = project(p, rig, 0.5);
    b.point_id = 4;
    a.point_id = 3;
    CHECK_THROWS_AS(finite_diff_flow(a, b), MismatchedTrack);
  }
}

TEST_CASE("add_flow_noise") {
  FlowSample fs;
  fs.rho = 10.0;
  fs.rho_dot = 2.0;
  fs.t = 1.25;
  fs.point_id = 7;

  SECTION("sigma 0 is the identity") {
    const auto out = add_flow_noise(fs, 0.0, 123);
    CHECK(out.rho_dot == fs.rho_dot);
    CHECK(out.quality == fs.quality);
  }
  SECTION("deterministic in (seed, id, t)") {
    const auto a = add_flow_noise(fs, 0.01, 123);
    const auto b = add_flow_noise(fs, 0.01, 123);
    CHECK(a.rho_dot == b.rho_dot);
    CHECK(a.quality == FlowQuality::noisy);
    const auto c = add_flow_noise(fs, 0.01, 124);
    CHECK(a.rho_dot != c.rho_dot);
    auto fs2 = fs;
    fs2.point_id = 8;
    CHECK(add_flow_noise(fs2, 0.01, 123).rho_dot != a.rho_dot);
  }
  SECTION("empirical relative std matches sigma") {
    const double sigma = 0.01;
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      FlowSample s = fs;
      s.point_id = i;
      const auto out = add_flow_noise(s, sigma, 999);
      const double rel = (out.rho_dot - s.rho_dot) / s.rho_dot;
      sum += rel;
      sum2 += rel * rel;
    }
    const double mean = sum / n;
    const double std = std::sqrt(sum2 / n - mean * mean);
    CHECK(std > sigma * 0.95);
    CHECK(std < sigma * 1.05);
  }
}
