#pragma once

// Line-oriented scene file:
//   camera speed=<f> focal=<f> width=<i> height=<i>   (first non-comment line)
//   point <x> <y> <z> [vx vy vz]
//   box <cx> <cy> <cz> <sx> <sy> <sz> samples=<i> [vx vy vz]
// '#' starts a comment; blank lines are ignored. Point ids are assigned in
// file order starting at 0.

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flowinv/errors.hpp"
#include "flowinv/scene.hpp"

namespace flowinv {

namespace detail {

inline std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> toks;
  std::istringstream iss{std::string(line)};
  std::string t;
  while (iss >> t) {
    if (t.front() == '#') break;
    toks.push_back(t);
  }
  return toks;
}

inline double parse_real(const std::string& tok, int line) {
  double v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "expected a number, got '" + tok + "'");
  return v;
}

inline long parse_int(const std::string& tok, int line) {
  long v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  return v;
}

// key=value, value returned as string
inline std::string expect_kv(const std::string& tok, std::string_view key, int line) {
  auto eq = tok.find('=');
  if (eq == std::string::npos || std::string_view(tok).substr(0, eq) != key)
    throw ParseError(line, "expected " + std::string(key) + "=<value>, got '" + tok + "'");
  return tok.substr(eq + 1);
}

}  // namespace detail

inline Scene parse_scene(std::string_view text) {
  std::optional<CameraRig> rig;
  std::vector<ScenePoint> points;
  std::int64_t next_id = 0;

  std::istringstream input{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(input, raw)) {
    ++line_no;
    auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;

    if (toks[0] == "camera") {
      if (rig) throw ParseError(line_no, "duplicate camera line");
      if (toks.size() != 5) throw ParseError(line_no, "camera takes speed= focal= width= height=");
      const double speed = detail::parse_real(detail::expect_kv(toks[1], "speed", line_no), line_no);
      const double focal = detail::parse_real(detail::expect_kv(toks[2], "focal", line_no), line_no);
      const long width = detail::parse_int(detail::expect_kv(toks[3], "width", line_no), line_no);
      const long height = detail::parse_int(detail::expect_kv(toks[4], "height", line_no), line_no);
      if (speed <= 0.0) throw ParseError(line_no, "nonpositive speed");
      if (focal <= 0.0) throw ParseError(line_no, "nonpositive focal");
      if (width <= 0 || height <= 0) throw ParseError(line_no, "nonpositive image dimension");
      rig.emplace(speed, focal, static_cast<int>(width), static_cast<int>(height));
      continue;
    }
    if (!rig) throw ParseError(line_no, "camera line must come first");

    if (toks[0] == "point") {
      if (toks.size() != 4 && toks.size() != 7)
        throw ParseError(line_no, "point takes 3 or 6 numbers");
      ScenePoint p;
      p.id = next_id++;
      p.position0 = {detail::parse_real(toks[1], line_no), detail::parse_real(toks[2], line_no),
                     detail::parse_real(toks[3], line_no)};
      if (toks.size() == 7)
        p.velocity = {detail::parse_real(toks[4], line_no), detail::parse_real(toks[5], line_no),
                      detail::parse_real(toks[6], line_no)};
      points.push_back(p);
    } else if (toks[0] == "box") {
      if (toks.size() != 8 && toks.size() != 11)
        throw ParseError(line_no, "box takes center, size, samples=, optional velocity");
      const Vec3 center{detail::parse_real(toks[1], line_no), detail::parse_real(toks[2], line_no),
                        detail::parse_real(toks[3], line_no)};
      const Vec3 size{detail::parse_real(toks[4], line_no), detail::parse_real(toks[5], line_no),
                      detail::parse_real(toks[6], line_no)};
      const long samples = detail::parse_int(detail::expect_kv(toks[7], "samples", line_no), line_no);
      Vec3 vel;
      if (toks.size() == 11)
        vel = {detail::parse_real(toks[8], line_no), detail::parse_real(toks[9], line_no),
               detail::parse_real(toks[10], line_no)};
      if (samples < 2) throw ParseError(line_no, "samples must be >= 2");
      for (auto& p : expand_box(center, size, static_cast<int>(samples), vel)) {
        p.id = next_id++;
        points.push_back(p);
      }
    } else {
      throw ParseError(line_no, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!rig) throw ParseError(line_no == 0 ? 1 : line_no, "missing camera line");
  return Scene{std::move(points), *rig};
}

}  // namespace flowinv
