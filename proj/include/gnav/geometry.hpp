#pragma once

#include <cmath>

namespace gnav {

/// 3D vector in meters (or m/s, m/s^2). y is up; the horizontal plane is xz.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  double length() const { return std::sqrt(x * x + y * y + z * z); }
  double horizontal_length() const { return std::sqrt(x * x + z * z); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

using Position = Vec3;

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).length(); }

constexpr double squared_distance(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return dot(d, d);
}

inline Vec3 normalized(const Vec3& v) {
  const double len = v.length();
  return len > 0.0 ? v * (1.0 / len) : Vec3{};
}

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Axis-aligned solid box standing on the terrain.
struct Box {
  double min_x = 0.0;
  double min_z = 0.0;
  double max_x = 0.0;
  double max_z = 0.0;
  double bottom = 0.0;  // y of the box floor, buried below the lowest footprint terrain
  double top = 0.0;     // roof height (absolute y)
  bool walkable_roof = false;

  bool footprint_contains(double x, double z, double margin = 0.0) const {
    return x >= min_x - margin && x <= max_x + margin && z >= min_z - margin && z <= max_z + margin;
  }
  bool contains(const Vec3& p) const {
    return p.x > min_x && p.x < max_x && p.z > min_z && p.z < max_z && p.y > bottom && p.y < top;
  }
  bool operator==(const Box&) const = default;
};

}  // namespace gnav
