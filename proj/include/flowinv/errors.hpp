#pragma once

#include <stdexcept>
#include <string>

namespace flowinv {

struct BehindCamera : std::runtime_error {
  explicit BehindCamera(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateFlow : std::runtime_error {
  explicit DegenerateFlow(const std::string& what) : std::runtime_error(what) {}
};

struct OnAxisError : std::runtime_error {
  explicit OnAxisError(const std::string& what) : std::runtime_error(what) {}
};

struct MismatchedTrack : std::runtime_error {
  explicit MismatchedTrack(const std::string& what) : std::runtime_error(what) {}
};

struct TooShort : std::runtime_error {
  explicit TooShort(const std::string& what) : std::runtime_error(what) {}
};

struct IdMismatch : std::runtime_error {
  explicit IdMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct BadRange : std::runtime_error {
  explicit BadRange(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Scene-file and CSV errors carry a 1-based line number.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

}  // namespace flowinv
