#pragma once

// Pinhole projection and synthesis of the measurable flow quantities
// (rho, theta, rho_dot): exact from ground truth, by finite differences
// between two projections, or with multiplicative noise on rho_dot.

#include <cmath>
#include <cstdint>
#include <random>

#include "flowinv/errors.hpp"
#include "flowinv/scene.hpp"

namespace flowinv {

// Image coordinates relative to the principal point; the FOE is (0,0).
struct ImagePoint {
  double u{0.0};
  double v{0.0};
  double t{0.0};
  std::int64_t point_id{0};

  double rho() const { return std::hypot(u, v); }
  bool in_frame(const CameraRig& rig, double margin = 0.0) const {
    return std::abs(u) <= rig.width / 2.0 + margin &&
           std::abs(v) <= rig.height / 2.0 + margin;
  }
};

enum class FlowQuality { analytic, finite_diff, noisy };

inline const char* to_string(FlowQuality q) {
  switch (q) {
    case FlowQuality::analytic: return "analytic";
    case FlowQuality::finite_diff: return "finite_diff";
    case FlowQuality::noisy: return "noisy";
  }
  return "?";
}

struct FlowSample {
  double rho{0.0};        // pixels from the FOE
  double theta{0.0};
  double rho_dot{0.0};    // pixels/second
  double t{0.0};
  std::int64_t point_id{0};
  FlowQuality quality{FlowQuality::analytic};
};

inline ImagePoint project(const ScenePoint& p, const CameraRig& rig, double t) {
  auto [pos, vel] = relative_state(p, rig, t);
  if (pos.z <= 0.0)
    throw BehindCamera("point " + std::to_string(p.id) + " at or behind camera");
  return {rig.focal * pos.x / pos.z, rig.focal * pos.y / pos.z, t, p.id};
}

// Exact flow from ground truth: rho = f tan(alpha), rho_dot by the chain rule.
inline FlowSample analytic_flow(const ScenePoint& p, const CameraRig& rig, double t) {
  const GroundTruthGeometry g = ground_truth(p, rig, t);
  FlowSample fs;
  fs.t = t;
  fs.point_id = p.id;
  fs.quality = FlowQuality::analytic;
  if (g.on_axis) return fs;  // rho = rho_dot = theta = 0 at the FOE
  fs.rho = rig.focal * std::tan(g.alpha);
  fs.rho_dot = g.alpha_dot * (rig.focal * rig.focal + fs.rho * fs.rho) / rig.focal;
  fs.theta = g.theta;
  return fs;
}

// Central difference between two projections of the same point, stamped at
// the interval midpoint so the estimate is second-order accurate.
inline FlowSample finite_diff_flow(const ImagePoint& a, const ImagePoint& b) {
  if (a.point_id != b.point_id)
    throw MismatchedTrack("flow pair ids " + std::to_string(a.point_id) + " vs " +
                          std::to_string(b.point_id));
  const double dt = b.t - a.t;
  if (dt <= 0.0) throw BadRange("finite_diff_flow needs b.t > a.t");
  FlowSample fs;
  fs.rho = (a.rho() + b.rho()) / 2.0;
  fs.rho_dot = (b.rho() - a.rho()) / dt;
  fs.theta = std::atan2(a.v, a.u);
  fs.t = a.t + dt / 2.0;
  fs.point_id = a.point_id;
  fs.quality = FlowQuality::finite_diff;
  return fs;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Multiplicative Gaussian perturbation of rho_dot. The generator is keyed on
// (seed, point_id, t quantized to 1 ns) so results do not depend on call
// order or thread count.
inline FlowSample add_flow_noise(const FlowSample& sample, double sigma_rho_dot,
                                 std::uint64_t seed) {
  if (sigma_rho_dot < 0.0) throw BadRange("noise sigma must be >= 0");
  if (sigma_rho_dot == 0.0) return sample;

  const auto qt = static_cast<std::uint64_t>(std::llround(sample.t * 1e9));
  std::uint64_t key = detail::splitmix64(seed);
  key = detail::splitmix64(key ^ static_cast<std::uint64_t>(sample.point_id));
  key = detail::splitmix64(key ^ qt);
  std::mt19937_64 rng(key);
  std::normal_distribution<double> gauss(0.0, 1.0);

  FlowSample out = sample;
  out.rho_dot += gauss(rng) * sigma_rho_dot * std::abs(sample.rho_dot);
  out.quality = FlowQuality::noisy;
  return out;
}

}  // namespace flowinv
