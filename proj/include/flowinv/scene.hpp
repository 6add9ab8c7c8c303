#pragma once

// World model and analytic ground truth for a camera translating at constant
// speed along its optical axis (+z). The camera starts at the origin; the
// focus of expansion sits at the principal point for every frame.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowinv/errors.hpp"
#include "flowinv/vec3.hpp"

namespace flowinv {

struct ScenePoint {
  std::int64_t id{0};
  Vec3 position0;           // world position at t = 0
  Vec3 velocity;            // constant world velocity; zero for stationary
  std::string tag;

  bool stationary() const { return velocity.is_zero(); }
};

struct CameraRig {
  double speed;             // m/s along +z, ground truth only
  double focal;             // pixels
  int width;
  int height;

  CameraRig(double speed_, double focal_, int width_, int height_)
      : speed(speed_), focal(focal_), width(width_), height(height_) {
    if (!(speed > 0.0)) throw BadRange("camera speed must be positive");
    if (!(focal > 0.0)) throw BadRange("camera focal must be positive");
    if (width <= 0 || height <= 0) throw BadRange("image dimensions must be positive");
  }

  Vec3 position_at(double t) const { return {0.0, 0.0, speed * t}; }
};

struct Scene {
  std::vector<ScenePoint> points;
  CameraRig rig;
};

// Exact per-point geometry: radial distance d from the motion axis, depth s
// ahead of the camera, range r, sight-line angle alpha and its rate, and the
// radial-line angle theta in the image plane.
struct GroundTruthGeometry {
  double d;
  double s;
  double r;
  double alpha;       // [0, pi/2)
  double alpha_dot;
  double theta;       // (-pi, pi], 0 when on axis
  bool on_axis;
};

// Position and velocity of a point in the camera frame at time t.
inline std::pair<Vec3, Vec3> relative_state(const ScenePoint& p, const CameraRig& rig,
                                            double t) {
  Vec3 pos = p.position0 + p.velocity * t - rig.position_at(t);
  Vec3 vel = p.velocity - Vec3{0.0, 0.0, rig.speed};
  return {pos, vel};
}

inline GroundTruthGeometry ground_truth(const ScenePoint& p, const CameraRig& rig,
                                        double t) {
  auto [pos, vel] = relative_state(p, rig, t);
  const double s = pos.z;
  const double d = std::hypot(pos.x, pos.y);
  const double r2 = d * d + s * s;
  if (s <= 0.0) throw BehindCamera("point " + std::to_string(p.id) + " at or behind camera");

  GroundTruthGeometry g;
  g.d = d;
  g.s = s;
  g.r = std::sqrt(r2);
  if (d == 0.0) {
    g.alpha = 0.0;
    g.alpha_dot = 0.0;
    g.theta = 0.0;
    g.on_axis = true;
    return g;
  }
  g.alpha = std::atan2(d, s);
  const double d_dot = (pos.x * vel.x + pos.y * vel.y) / d;
  const double s_dot = vel.z;
  g.alpha_dot = (d_dot * s - d * s_dot) / r2;
  g.theta = std::atan2(pos.y, pos.x);
  g.on_axis = false;
  return g;
}

// Uniform grid over the six faces of an axis-aligned box, duplicates merged.
inline std::vector<ScenePoint> expand_box(const Vec3& center, const Vec3& size,
                                          int samples_per_edge, const Vec3& velocity) {
  if (samples_per_edge < 2) throw BadRange("box samples must be >= 2");
  if (!(size.x > 0.0 && size.y > 0.0 && size.z > 0.0))
    throw BadRange("box size components must be positive");

  const int n = samples_per_edge;
  std::vector<ScenePoint> out;
  out.reserve(static_cast<std::size_t>(n) * n * 6);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const bool on_face = i == 0 || i == n - 1 || j == 0 || j == n - 1 ||
                             k == 0 || k == n - 1;
        if (!on_face) continue;
        const double fx = static_cast<double>(i) / (n - 1) - 0.5;
        const double fy = static_cast<double>(j) / (n - 1) - 0.5;
        const double fz = static_cast<double>(k) / (n - 1) - 0.5;
        ScenePoint p;
        p.position0 = {center.x + fx * size.x, center.y + fy * size.y,
                       center.z + fz * size.z};
        p.velocity = velocity;
        out.push_back(p);
      }
    }
  }
  return out;
}

// Line segment sampled at n points including both endpoints.
inline std::vector<ScenePoint> sample_segment(const Vec3& a, const Vec3& b, int n,
                                              const Vec3& velocity = {}) {
  if (n < 2) throw BadRange("segment samples must be >= 2");
  std::vector<ScenePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    ScenePoint p;
    p.position0 = a + (b - a) * f;
    p.velocity = velocity;
    out.push_back(p);
  }
  return out;
}

}  // namespace flowinv
