#pragma once

#include <cmath>

namespace kinhybrid {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Unit direction of flight. Problems are z-invariant, so only the planar
/// components move a particle; the z component still counts toward path length.
struct Direction3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double planar_norm() const { return std::hypot(x, y); }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  friend bool operator==(const Direction3&, const Direction3&) = default;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

}  // namespace kinhybrid
