#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace saswarm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4f = Eigen::Vector4f;

/// Axis-aligned rectangle on the ground plane (meters).
struct Rect {
  Vec2 min{0.0, 0.0};
  Vec2 max{0.0, 0.0};

  double width() const { return max.x() - min.x(); }
  double height() const { return max.y() - min.y(); }
  double area() const { return width() * height(); }
  double area_ha() const { return area() / 1e4; }
  Vec2 center() const { return 0.5 * (min + max); }
  bool contains(const Vec2& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
  }
  Rect inset(double margin) const { return {min + Vec2(margin, margin), max - Vec2(margin, margin)}; }
  bool valid() const { return max.x() > min.x() && max.y() > min.y(); }
};

inline double deg_to_rad(double d) { return d * M_PI / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / M_PI; }

/// Counter-clockwise perpendicular.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

/// Unit vector, with norm(0) := 0.
inline Vec2 unit_or_zero(const Vec2& v, double eps = 1e-12) {
  double n = v.norm();
  return n < eps ? Vec2::Zero() : Vec2(v / n);
}

/// Angle between two nonzero vectors, degrees in [0, 180].
inline double angle_between_deg(const Vec2& a, const Vec2& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("angle_between_deg: zero vector");
  double c = a.dot(b) / (na * nb);
  c = std::clamp(c, -1.0, 1.0);
  return rad_to_deg(std::acos(c));
}

}  // namespace saswarm
