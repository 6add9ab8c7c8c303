#pragma once

// Time-Clearance and Time-to-Contact from measurable flow. Nothing in this
// header has access to camera speed or world geometry: inputs are rho, theta,
// rho_dot, and the focal length only.

#include <cmath>
#include <cstdint>
#include <string_view>

#include "flowinv/errors.hpp"
#include "flowinv/projection.hpp"

namespace flowinv {

// Both invariants are 0/0 at the FOE; rates below this are degenerate.
inline constexpr double kMinAlphaDot = 1e-12;  // rad/s

enum class InvariantStatus { ok, on_axis, degenerate };

inline const char* to_string(InvariantStatus s) {
  switch (s) {
    case InvariantStatus::ok: return "ok";
    case InvariantStatus::on_axis: return "on_axis";
    case InvariantStatus::degenerate: return "degenerate";
  }
  return "?";
}

struct InvariantPoint {
  double ttc{0.0};    // seconds
  double tc{0.0};     // seconds, Time-Clearance
  double theta{0.0};
  double t{0.0};
  std::int64_t point_id{0};
  InvariantStatus status{InvariantStatus::ok};
};

// Cartesian embedding of the (tc, theta, ttc) cylinder coordinates. For a
// stationary point this is the camera-frame position scaled by 1/speed.
struct EmbeddedPoint {
  double ex{0.0};
  double ey{0.0};
  double ez{0.0};
};

inline double alpha_from_rho(double rho, double focal) {
  return std::atan2(rho, focal);
}

inline double alpha_dot_from_flow(double rho, double rho_dot, double focal) {
  return rho_dot * focal / (focal * focal + rho * rho);
}

inline double time_clearance(double alpha, double alpha_dot) {
  if (alpha == 0.0) throw OnAxisError("time_clearance undefined at the FOE");
  if (std::abs(alpha_dot) <= kMinAlphaDot)
    throw DegenerateFlow("alpha_dot below degeneracy threshold");
  const double sa = std::sin(alpha);
  return sa * sa / alpha_dot;
}

inline double time_to_contact(double alpha, double alpha_dot) {
  if (alpha == 0.0) throw OnAxisError("time_to_contact undefined at the FOE");
  if (std::abs(alpha_dot) <= kMinAlphaDot)
    throw DegenerateFlow("alpha_dot below degeneracy threshold");
  return std::sin(2.0 * alpha) / (2.0 * alpha_dot);
}

// Full flow-to-invariant transform. Degenerate and on-axis samples come back
// flagged rather than thrown so dense pipelines can mask them.
inline InvariantPoint to_invariant_domain(const FlowSample& fs, double focal) {
  InvariantPoint ip;
  ip.theta = fs.theta;
  ip.t = fs.t;
  ip.point_id = fs.point_id;
  if (fs.rho == 0.0) {
    ip.status = InvariantStatus::on_axis;
    return ip;
  }
  const double alpha = alpha_from_rho(fs.rho, focal);
  const double alpha_dot = alpha_dot_from_flow(fs.rho, fs.rho_dot, focal);
  if (std::abs(alpha_dot) <= kMinAlphaDot) {
    ip.status = InvariantStatus::degenerate;
    return ip;
  }
  ip.tc = time_clearance(alpha, alpha_dot);
  ip.ttc = time_to_contact(alpha, alpha_dot);
  return ip;
}

inline EmbeddedPoint embed(const InvariantPoint& ip) {
  return {ip.tc * std::cos(ip.theta), ip.tc * std::sin(ip.theta), ip.ttc};
}

}  // namespace flowinv
