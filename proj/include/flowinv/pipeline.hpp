#pragma once

// Stage drivers shared by the CLI and the tests: track synthesis over a
// frame window, the flow-to-invariant transform over CSV rows, and the
// pyramid fixture used by the demo.

#include <cstdint>
#include <vector>

#include "flowinv/csv.hpp"
#include "flowinv/invariants.hpp"
#include "flowinv/projection.hpp"
#include "flowinv/scene.hpp"

namespace flowinv {

enum class FlowMode { analytic, finite_diff };

struct SimulateOptions {
  int frames{2};
  double dt{1.0};
  FlowMode mode{FlowMode::analytic};
  double noise_sigma{0.0};
  std::uint64_t seed{0};
};

// One row per visible point per frame (analytic) or per consecutive frame
// pair (finite differences, stamped at pair midpoints). Points behind the
// camera or outside the frame are skipped. Noise is applied last.
inline std::vector<TrackRow> simulate_tracks(const Scene& scene, const SimulateOptions& opt) {
  if (opt.frames < 2) throw BadRange("frames must be >= 2");
  if (opt.dt <= 0.0) throw BadRange("dt must be > 0");

  std::vector<TrackRow> rows;
  auto emit = [&](const FlowSample& fs, const ImagePoint& img) {
    TrackRow r;
    r.flow = opt.noise_sigma > 0.0 ? add_flow_noise(fs, opt.noise_sigma, opt.seed) : fs;
    r.u = img.u;
    r.v = img.v;
    rows.push_back(r);
  };

  if (opt.mode == FlowMode::analytic) {
    for (int k = 0; k < opt.frames; ++k) {
      const double t = k * opt.dt;
      for (const auto& p : scene.points) {
        auto [pos, vel] = relative_state(p, scene.rig, t);
        if (pos.z <= 0.0) continue;
        const ImagePoint img = project(p, scene.rig, t);
        if (!img.in_frame(scene.rig)) continue;
        emit(analytic_flow(p, scene.rig, t), img);
      }
    }
  } else {
    for (int k = 0; k + 1 < opt.frames; ++k) {
      const double ta = k * opt.dt;
      const double tb = (k + 1) * opt.dt;
      for (const auto& p : scene.points) {
        auto [pa, va] = relative_state(p, scene.rig, ta);
        auto [pb, vb] = relative_state(p, scene.rig, tb);
        if (pa.z <= 0.0 || pb.z <= 0.0) continue;
        const ImagePoint a = project(p, scene.rig, ta);
        const ImagePoint b = project(p, scene.rig, tb);
        if (!a.in_frame(scene.rig) || !b.in_frame(scene.rig)) continue;
        const ImagePoint mid{(a.u + b.u) / 2.0, (a.v + b.v) / 2.0, ta + opt.dt / 2.0, p.id};
        emit(finite_diff_flow(a, b), mid);
      }
    }
  }
  return rows;
}

inline std::vector<InvariantPoint> transform_tracks(const std::vector<TrackRow>& rows,
                                                    double focal) {
  std::vector<InvariantPoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(to_invariant_domain(r.flow, focal));
  return out;
}

// Square-based pyramid ahead of the camera: 5 vertices plus each of the 8
// edges sampled at samples_per_edge interior points.
inline std::vector<ScenePoint> pyramid_cloud(const Vec3& base_center, double base_half,
                                             double height, int samples_per_edge,
                                             const Vec3& velocity = {}) {
  const Vec3 c = base_center;
  const Vec3 corners[4] = {
      {c.x - base_half, c.y - base_half, c.z},
      {c.x + base_half, c.y - base_half, c.z},
      {c.x + base_half, c.y + base_half, c.z},
      {c.x - base_half, c.y + base_half, c.z},
  };
  const Vec3 apex{c.x, c.y + height, c.z};

  std::vector<ScenePoint> out;
  auto add = [&](const Vec3& pos) {
    ScenePoint p;
    p.id = static_cast<std::int64_t>(out.size());
    p.position0 = pos;
    p.velocity = velocity;
    out.push_back(p);
  };
  for (const auto& v : corners) add(v);
  add(apex);
  auto add_edge = [&](const Vec3& a, const Vec3& b) {
    for (int i = 1; i <= samples_per_edge; ++i) {
      const double f = static_cast<double>(i) / (samples_per_edge + 1);
      add(a + (b - a) * f);
    }
  };
  for (int i = 0; i < 4; ++i) {
    add_edge(corners[i], corners[(i + 1) % 4]);
    add_edge(corners[i], apex);
  }
  return out;
}

}  // namespace flowinv
