#pragma once

#include <cmath>

namespace flowinv {

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& r) const { return {x + r.x, y + r.y, z + r.z}; }
  constexpr Vec3 operator-(const Vec3& r) const { return {x - r.x, y - r.y, z - r.z}; }
  constexpr Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  constexpr bool operator==(const Vec3& r) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  bool is_zero() const { return x == 0.0 && y == 0.0 && z == 0.0; }
};

constexpr Vec3 operator*(double k, const Vec3& v) { return v * k; }

}  // namespace flowinv
