#pragma once

#include <random>

#include "flowinv/scene.hpp"

namespace flowinv::testing {

// Random stationary point with d in [0.1, 50], s in [0.5, 100], uniform
// radial angle.
inline ScenePoint random_stationary_point(std::mt19937_64& rng, std::int64_t id) {
  std::uniform_real_distribution<double> d_dist(0.1, 50.0);
  std::uniform_real_distribution<double> s_dist(0.5, 100.0);
  std::uniform_real_distribution<double> ang(-3.14159265358979323846, 3.14159265358979323846);
  const double d = d_dist(rng);
  const double s = s_dist(rng);
  const double th = ang(rng);
  ScenePoint p;
  p.id = id;
  p.position0 = {d * std::cos(th), d * std::sin(th), s};
  return p;
}

inline double random_speed(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.1, 10.0)(rng);
}

}  // namespace flowinv::testing
