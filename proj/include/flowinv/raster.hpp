#pragma once

// Dense per-pixel maps of 1/TTC and 1/Time-Clearance by nearest-pixel point
// splatting with a z-buffer, plus colorization and binary PPM output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "flowinv/errors.hpp"
#include "flowinv/invariants.hpp"
#include "flowinv/projection.hpp"
#include "flowinv/scene.hpp"

namespace flowinv {

enum class MapKind { ttc_inv, tc_inv };

struct ScalarGrid {
  int width{0};
  int height{0};
  std::vector<double> values;   // row-major, units 1/s
  std::vector<std::uint8_t> mask;     // 1 = valid
  std::vector<double> zbuffer;  // depth s that won the pixel

  ScalarGrid(int w, int h)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0),
        mask(static_cast<std::size_t>(w) * h, 0),
        zbuffer(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity()) {}

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

struct RgbImage {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> pixels;  // RGB triples, row-major

  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}
};

namespace detail {

struct SplatWinner {
  double s{std::numeric_limits<double>::infinity()};
  std::int64_t point_id{std::numeric_limits<std::int64_t>::max()};

  // Smallest depth wins; ties go to the smaller point id so the result is
  // independent of splat order.
  bool beats(const SplatWinner& o) const {
    return s < o.s || (s == o.s && point_id < o.point_id);
  }
};

}  // namespace detail

// Projects every scene point at time t, keeps the nearest point per pixel,
// and stores its 1/TTC or 1/Time-Clearance from analytic flow. Pixels with
// no hit, on-axis, degenerate, or non-finite values stay masked. The result
// is bit-identical for any thread count.
inline ScalarGrid splat_map(const Scene& scene, const CameraRig& rig, double t,
                            MapKind kind, unsigned threads = 1) {
  ScalarGrid grid(rig.width, rig.height);
  const std::size_t npix = grid.values.size();
  const double cx = (rig.width - 1) / 2.0;
  const double cy = (rig.height - 1) / 2.0;

  auto splat_range = [&](std::size_t lo, std::size_t hi, std::vector<detail::SplatWinner>& best) {
    for (std::size_t i = lo; i < hi; ++i) {
      const ScenePoint& p = scene.points[i];
      auto [pos, vel] = relative_state(p, rig, t);
      if (pos.z <= 0.0) continue;
      const double u = rig.focal * pos.x / pos.z;
      const double v = rig.focal * pos.y / pos.z;
      const int px = static_cast<int>(std::lround(u + cx));
      const int py = static_cast<int>(std::lround(v + cy));
      if (px < 0 || px >= rig.width || py < 0 || py >= rig.height) continue;
      detail::SplatWinner w{pos.z, p.id};
      auto& slot = best[grid.index(px, py)];
      if (w.beats(slot)) slot = w;
    }
  };

  std::vector<detail::SplatWinner> best(npix);
  if (threads <= 1 || scene.points.size() < 2 * threads) {
    splat_range(0, scene.points.size(), best);
  } else {
    std::vector<std::vector<detail::SplatWinner>> partial(threads,
                                                          std::vector<detail::SplatWinner>(npix));
    {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (scene.points.size() + threads - 1) / threads;
      for (unsigned k = 0; k < threads; ++k) {
        const std::size_t lo = std::min(k * chunk, scene.points.size());
        const std::size_t hi = std::min(lo + chunk, scene.points.size());
        pool.emplace_back([&, lo, hi, k] { splat_range(lo, hi, partial[k]); });
      }
    }
    for (const auto& part : partial)
      for (std::size_t i = 0; i < npix; ++i)
        if (part[i].beats(best[i])) best[i] = part[i];
  }

  std::unordered_map<std::int64_t, const ScenePoint*> by_id;
  by_id.reserve(scene.points.size());
  for (const auto& p : scene.points) by_id.emplace(p.id, &p);

  for (std::size_t i = 0; i < npix; ++i) {
    if (!std::isfinite(best[i].s)) continue;
    const ScenePoint& p = *by_id.at(best[i].point_id);
    const FlowSample fs = analytic_flow(p, rig, t);
    const InvariantPoint ip = to_invariant_domain(fs, rig.focal);
    if (ip.status != InvariantStatus::ok) continue;  // mask FOE/degenerate pixels
    const double value = kind == MapKind::ttc_inv ? 1.0 / ip.ttc : 1.0 / ip.tc;
    if (!std::isfinite(value)) continue;
    grid.values[i] = value;
    grid.mask[i] = 1;
    grid.zbuffer[i] = best[i].s;
  }
  return grid;
}

// Percentile over valid pixels; used for the default vmax.
inline double valid_percentile(const ScalarGrid& grid, double pct) {
  std::vector<double> vals;
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    if (grid.mask[i]) vals.push_back(grid.values[i]);
  if (vals.empty()) return 1.0;
  std::sort(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(pct / 100.0 * (vals.size() - 1));
  return vals[idx];
}

namespace detail {

inline void hsv_to_rgb(double hue_deg, std::uint8_t* rgb) {
  // saturation = value = 1
  const double h = hue_deg / 60.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const auto q = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - f)));
  const auto tt = static_cast<std::uint8_t>(std::lround(255.0 * f));
  switch (sector) {
    case 0: rgb[0] = 255; rgb[1] = tt; rgb[2] = 0; break;
    case 1: rgb[0] = q; rgb[1] = 255; rgb[2] = 0; break;
    case 2: rgb[0] = 0; rgb[1] = 255; rgb[2] = tt; break;
    case 3: rgb[0] = 0; rgb[1] = q; rgb[2] = 255; break;
    case 4: rgb[0] = tt; rgb[1] = 0; rgb[2] = 255; break;
    default: rgb[0] = 255; rgb[1] = 0; rgb[2] = q; break;
  }
}

}  // namespace detail

// Blue (vmin) through green to red (vmax); masked pixels black.
inline RgbImage colorize(const ScalarGrid& grid, double vmin, double vmax) {
  if (!(vmax > vmin)) throw BadRange("colorize needs vmax > vmin");
  RgbImage img(grid.width, grid.height);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (!grid.mask[i]) continue;
    const double u = std::clamp((grid.values[i] - vmin) / (vmax - vmin), 0.0, 1.0);
    detail::hsv_to_rgb(240.0 * (1.0 - u), &img.pixels[i * 3]);
  }
  return img;
}

struct CombineRanges {
  double ttc_vmin{0.0};
  double ttc_vmax{1.0};
  double tc_vmin{0.0};
  double tc_vmax{1.0};
};

// R channel from 1/TTC, G from 1/Time-Clearance, B zero.
inline RgbImage combine(const ScalarGrid& ttc_inv, const ScalarGrid& tc_inv,
                        const CombineRanges& ranges) {
  if (ttc_inv.width != tc_inv.width || ttc_inv.height != tc_inv.height)
    throw DimensionMismatch("combine inputs differ in size");
  if (!(ranges.ttc_vmax > ranges.ttc_vmin) || !(ranges.tc_vmax > ranges.tc_vmin))
    throw BadRange("combine needs vmax > vmin");
  RgbImage img(ttc_inv.width, ttc_inv.height);
  for (std::size_t i = 0; i < ttc_inv.values.size(); ++i) {
    if (!ttc_inv.mask[i] && !tc_inv.mask[i]) continue;
    if (ttc_inv.mask[i]) {
      const double u = std::clamp(
          (ttc_inv.values[i] - ranges.ttc_vmin) / (ranges.ttc_vmax - ranges.ttc_vmin), 0.0, 1.0);
      img.pixels[i * 3] = static_cast<std::uint8_t>(std::lround(255.0 * u));
    }
    if (tc_inv.mask[i]) {
      const double u = std::clamp(
          (tc_inv.values[i] - ranges.tc_vmin) / (ranges.tc_vmax - ranges.tc_vmin), 0.0, 1.0);
      img.pixels[i * 3 + 1] = static_cast<std::uint8_t>(std::lround(255.0 * u));
    }
  }
  return img;
}

// Binary PPM: "P6\n<w> <h>\n255\n" then RGB bytes, top row first.
inline void write_ppm(const RgbImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Debug dump: x,y,value,valid
inline void write_grid_csv(const ScalarGrid& grid, std::ostream& out) {
  out << "x,y,value,valid\n";
  char buf[64];
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      const std::size_t i = grid.index(x, y);
      std::snprintf(buf, sizeof buf, "%.17g", grid.mask[i] ? grid.values[i] : 0.0);
      out << x << ',' << y << ',' << buf << ',' << int(grid.mask[i]) << '\n';
    }
  }
}

}  // namespace flowinv
