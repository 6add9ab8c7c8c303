#pragma once

// Time-series analysis in the invariant domain: constancy residuals per
// track, moving-point classification, and the frame-to-frame shape-constancy
// metric. Works from invariant data alone; camera speed never enters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "flowinv/errors.hpp"
#include "flowinv/invariants.hpp"

namespace flowinv {

struct TrackSeries {
  std::int64_t point_id{0};
  std::vector<InvariantPoint> samples;  // status ok, timestamps strictly increasing
};

struct DetectionLabel {
  std::int64_t point_id{0};
  bool moving{false};
  double tc_residual{0.0};
  double ttc_residual{0.0};
};

inline constexpr double kDefaultEpsAbs = 0.01;  // seconds
inline constexpr double kDefaultEpsRel = 0.02;

namespace detail {

inline double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 0) {
    double lo = *std::max_element(v.begin(), v.begin() + mid);
    return (lo + hi) / 2.0;
  }
  return hi;
}

inline void require_track(const TrackSeries& ts) {
  if (ts.samples.size() < 2)
    throw TooShort("track " + std::to_string(ts.point_id) + " has fewer than 2 samples");
}

}  // namespace detail

// Max deviation of Time-Clearance from its track median. Zero for a
// stationary point under exact flow.
inline double tc_residual(const TrackSeries& ts) {
  detail::require_track(ts);
  std::vector<double> tc;
  tc.reserve(ts.samples.size());
  for (const auto& s : ts.samples) tc.push_back(s.tc);
  const double med = detail::median(tc);
  double worst = 0.0;
  for (double v : tc) worst = std::max(worst, std::abs(v - med));
  return worst;
}

// Max deviation of the unit-rate-compensated TTC, ttc(t) + t, from its
// median. Stationary points decay at exactly unit rate, so this is zero.
inline double ttc_drift_residual(const TrackSeries& ts) {
  detail::require_track(ts);
  std::vector<double> comp;
  comp.reserve(ts.samples.size());
  for (const auto& s : ts.samples) comp.push_back(s.ttc + s.t);
  const double med = detail::median(comp);
  double worst = 0.0;
  for (double v : comp) worst = std::max(worst, std::abs(v - med));
  return worst;
}

inline DetectionLabel classify(const TrackSeries& ts, double eps_abs = kDefaultEpsAbs,
                               double eps_rel = kDefaultEpsRel) {
  DetectionLabel label;
  label.point_id = ts.point_id;
  label.tc_residual = tc_residual(ts);
  label.ttc_residual = ttc_drift_residual(ts);

  std::vector<double> tc;
  tc.reserve(ts.samples.size());
  for (const auto& s : ts.samples) tc.push_back(s.tc);
  const double eps = eps_abs + eps_rel * std::abs(detail::median(tc));
  label.moving = label.tc_residual > eps || label.ttc_residual > eps;
  return label;
}

// Worst matched-point displacement between two frames after compensating
// frame_b's TTC by the elapsed time. Zero for a rigid stationary scene.
inline double shape_constancy(const std::vector<InvariantPoint>& frame_a,
                              const std::vector<InvariantPoint>& frame_b) {
  if (frame_a.size() != frame_b.size())
    throw IdMismatch("frames have different point counts");
  std::unordered_map<std::int64_t, EmbeddedPoint> a_by_id;
  a_by_id.reserve(frame_a.size());
  double t1 = 0.0, t2 = 0.0;
  for (const auto& ip : frame_a) {
    a_by_id.emplace(ip.point_id, embed(ip));
    t1 = ip.t;
  }
  if (!frame_b.empty()) t2 = frame_b.front().t;

  double worst = 0.0;
  for (const auto& ip : frame_b) {
    auto it = a_by_id.find(ip.point_id);
    if (it == a_by_id.end())
      throw IdMismatch("point " + std::to_string(ip.point_id) + " missing from first frame");
    InvariantPoint shifted = ip;
    shifted.ttc += t2 - t1;
    const EmbeddedPoint eb = embed(shifted);
    const EmbeddedPoint& ea = it->second;
    const double dist = std::sqrt((eb.ex - ea.ex) * (eb.ex - ea.ex) +
                                  (eb.ey - ea.ey) * (eb.ey - ea.ey) +
                                  (eb.ez - ea.ez) * (eb.ez - ea.ez));
    worst = std::max(worst, dist);
  }
  return worst;
}

// Group ok-status invariant rows into time-ordered tracks.
inline std::vector<TrackSeries> build_tracks(const std::vector<InvariantPoint>& rows) {
  std::unordered_map<std::int64_t, TrackSeries> by_id;
  for (const auto& ip : rows) {
    if (ip.status != InvariantStatus::ok) continue;
    auto& ts = by_id[ip.point_id];
    ts.point_id = ip.point_id;
    ts.samples.push_back(ip);
  }
  std::vector<TrackSeries> tracks;
  tracks.reserve(by_id.size());
  for (auto& [id, ts] : by_id) {
    std::sort(ts.samples.begin(), ts.samples.end(),
              [](const InvariantPoint& a, const InvariantPoint& b) { return a.t < b.t; });
    tracks.push_back(std::move(ts));
  }
  std::sort(tracks.begin(), tracks.end(),
            [](const TrackSeries& a, const TrackSeries& b) { return a.point_id < b.point_id; });
  return tracks;
}

}  // namespace flowinv
