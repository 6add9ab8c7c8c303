#pragma once

// Readers and writers for the pipeline's file formats. Numbers are written
// with 17 significant digits so round-trips are exact and runs are
// byte-reproducible.
//
//   tracks     point_id,t,u,v,rho,theta,rho_dot,quality
//   invariants point_id,t,ttc,tc,theta,status
//   labels     point_id,moving,tc_residual,ttc_residual
//
// A tracks file may start with "# focal=<f>" so the measurement side can be
// run from the CSV alone; focal is a camera intrinsic, not motion knowledge.

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "flowinv/constancy.hpp"
#include "flowinv/errors.hpp"
#include "flowinv/invariants.hpp"
#include "flowinv/projection.hpp"

namespace flowinv {

namespace csv_detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double to_real(const std::string& tok, int line) {
  double v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "bad number '" + tok + "'");
  return v;
}

inline std::int64_t to_id(const std::string& tok, int line) {
  std::int64_t v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "bad id '" + tok + "'");
  return v;
}

}  // namespace csv_detail

inline constexpr const char* kTracksHeader = "point_id,t,u,v,rho,theta,rho_dot,quality";
inline constexpr const char* kInvariantsHeader = "point_id,t,ttc,tc,theta,status";
inline constexpr const char* kLabelsHeader = "point_id,moving,tc_residual,ttc_residual";

struct TrackRow {
  FlowSample flow;
  double u{0.0};
  double v{0.0};
};

inline void write_tracks(std::ostream& out, const std::vector<TrackRow>& rows,
                         std::optional<double> focal = std::nullopt) {
  using csv_detail::fmt;
  if (focal) out << "# focal=" << fmt(*focal) << "\n";
  out << kTracksHeader << "\n";
  for (const auto& r : rows) {
    out << r.flow.point_id << ',' << fmt(r.flow.t) << ',' << fmt(r.u) << ',' << fmt(r.v)
        << ',' << fmt(r.flow.rho) << ',' << fmt(r.flow.theta) << ',' << fmt(r.flow.rho_dot)
        << ',' << to_string(r.flow.quality) << '\n';
  }
}

struct TracksFile {
  std::optional<double> focal;
  std::vector<TrackRow> rows;
};

inline TracksFile read_tracks(std::istream& in) {
  using namespace csv_detail;
  TracksFile file;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("focal=");
      if (pos != std::string::npos) file.focal = to_real(line.substr(pos + 6), line_no);
      continue;
    }
    if (!header_seen) {
      if (line != kTracksHeader) throw ParseError(line_no, "bad tracks header");
      header_seen = true;
      continue;
    }
    auto f = split(line);
    if (f.size() != 8) throw ParseError(line_no, "expected 8 fields");
    TrackRow r;
    r.flow.point_id = to_id(f[0], line_no);
    r.flow.t = to_real(f[1], line_no);
    r.u = to_real(f[2], line_no);
    r.v = to_real(f[3], line_no);
    r.flow.rho = to_real(f[4], line_no);
    r.flow.theta = to_real(f[5], line_no);
    r.flow.rho_dot = to_real(f[6], line_no);
    if (f[7] == "analytic") r.flow.quality = FlowQuality::analytic;
    else if (f[7] == "finite_diff") r.flow.quality = FlowQuality::finite_diff;
    else if (f[7] == "noisy") r.flow.quality = FlowQuality::noisy;
    else throw ParseError(line_no, "bad quality '" + f[7] + "'");
    file.rows.push_back(r);
  }
  if (!header_seen) throw ParseError(line_no == 0 ? 1 : line_no, "missing tracks header");
  return file;
}

inline void write_invariants(std::ostream& out, const std::vector<InvariantPoint>& rows) {
  using csv_detail::fmt;
  out << kInvariantsHeader << "\n";
  for (const auto& ip : rows) {
    out << ip.point_id << ',' << fmt(ip.t) << ',' << fmt(ip.ttc) << ',' << fmt(ip.tc)
        << ',' << fmt(ip.theta) << ',' << to_string(ip.status) << '\n';
  }
}

inline std::vector<InvariantPoint> read_invariants(std::istream& in) {
  using namespace csv_detail;
  std::vector<InvariantPoint> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kInvariantsHeader) throw ParseError(line_no, "bad invariants header");
      header_seen = true;
      continue;
    }
    auto f = split(line);
    if (f.size() != 6) throw ParseError(line_no, "expected 6 fields");
    InvariantPoint ip;
    ip.point_id = to_id(f[0], line_no);
    ip.t = to_real(f[1], line_no);
    ip.ttc = to_real(f[2], line_no);
    ip.tc = to_real(f[3], line_no);
    ip.theta = to_real(f[4], line_no);
    if (f[5] == "ok") ip.status = InvariantStatus::ok;
    else if (f[5] == "on_axis") ip.status = InvariantStatus::on_axis;
    else if (f[5] == "degenerate") ip.status = InvariantStatus::degenerate;
    else throw ParseError(line_no, "bad status '" + f[5] + "'");
    rows.push_back(ip);
  }
  if (!header_seen) throw ParseError(line_no == 0 ? 1 : line_no, "missing invariants header");
  return rows;
}

inline void write_labels(std::ostream& out, const std::vector<DetectionLabel>& labels) {
  using csv_detail::fmt;
  out << kLabelsHeader << "\n";
  for (const auto& l : labels) {
    out << l.point_id << ',' << (l.moving ? 1 : 0) << ',' << fmt(l.tc_residual) << ','
        << fmt(l.ttc_residual) << '\n';
  }
}

}  // namespace flowinv
