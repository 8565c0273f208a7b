#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kinhybrid/geometry.hpp"

namespace kinhybrid {

/// Zero-based cell coordinates; i runs along x, j along y.
struct CellIndex {
  int i = 0;
  int j = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct RaySegment {
  CellIndex cell;
  double entry = 0.0;   // path parameter where the ray enters the cell
  double length = 0.0;  // path length spent inside the cell
};

struct RayExit {
  bool exited = false;
  double exit_param = 0.0;
};

struct RayTrace {
  std::vector<RaySegment> segments;
  bool exited = false;      // the ray left the domain before reaching its length
  double exit_param = 0.0;  // path parameter of the domain exit (valid if exited)
};

/// Uniform square grid of n x n cells of side h with lower-left corner
/// (x_min, y_min). Immutable after construction.
class Mesh {
 public:
  Mesh(double x_min, double y_min, double h, int n);

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_min_ + n_ * h_; }
  double y_max() const { return y_min_ + n_ * h_; }
  double h() const { return h_; }
  int n() const { return n_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
  double cell_area() const { return h_ * h_; }

  double center_x(int i) const { return x_min_ + (i + 0.5) * h_; }
  double center_y(int j) const { return y_min_ + (j + 0.5) * h_; }
  Point2 center(CellIndex c) const { return {center_x(c.i), center_y(c.j)}; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }
  std::size_t index(CellIndex c) const { return index(c.i, c.j); }
  CellIndex cell(std::size_t flat) const {
    return {static_cast<int>(flat % static_cast<std::size_t>(n_)),
            static_cast<int>(flat / static_cast<std::size_t>(n_))};
  }

  bool contains(Point2 p) const { return p.x >= x_min_ && p.x <= x_max() && p.y >= y_min_ && p.y <= y_max(); }

  /// Owning cell of a point in the closed domain. Points on interior faces
  /// belong to the +x/+y neighbour; points on the upper domain faces belong to
  /// the last cell.
  std::optional<CellIndex> cell_of(Point2 p) const;

  /// Walks the ray origin + s * dir for s in [0, length]. dir is the planar
  /// projection of a unit direction (norm <= 1), so s is the 3-D path length.
  RayTrace trace_ray(Point2 origin, Point2 dir, double length) const;

  /// Same walk without storing segments: calls visit(cell, entry, length)
  /// for each piece in order. Used by the particle tracker.
  template <class Visit>
  RayExit walk_ray(Point2 origin, Point2 dir, double length, Visit&& visit) const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  double x_min_;
  double y_min_;
  double h_;
  int n_;
};

namespace detail {

inline constexpr double kGrazingGuard = 1e-12;

// Cell holding coordinate u (cell units) for motion with component d. On a
// face the cell ahead wins; d == 0 falls back to the +x/+y rule.
inline int start_index(double u, double d) {
  const double fl = std::floor(u);
  int idx = static_cast<int>(fl);
  if (u == fl && d < 0.0) --idx;
  return idx;
}

}  // namespace detail

template <class Visit>
RayExit Mesh::walk_ray(Point2 origin, Point2 dir, double length, Visit&& visit) const {
  RayExit out;
  if (!(length > 0.0)) return out;
  if (!contains(origin)) {
    out.exited = true;
    return out;
  }
  int i = detail::start_index((origin.x - x_min_) / h_, dir.x);
  int j = detail::start_index((origin.y - y_min_) / h_, dir.y);
  if (dir.x == 0.0) i = std::min(i, n_ - 1);
  if (dir.y == 0.0) j = std::min(j, n_ - 1);
  if (i < 0 || i >= n_ || j < 0 || j >= n_) {
    out.exited = true;
    return out;
  }

  const int step_i = dir.x > 0.0 ? 1 : -1;
  const int step_j = dir.y > 0.0 ? 1 : -1;
  constexpr double inf = std::numeric_limits<double>::infinity();

  double s = 0.0;
  while (true) {
    double tx = inf;
    double ty = inf;
    if (dir.x != 0.0) tx = (x_min_ + (dir.x > 0.0 ? i + 1 : i) * h_ - origin.x) / dir.x;
    if (dir.y != 0.0) ty = (y_min_ + (dir.y > 0.0 ? j + 1 : j) * h_ - origin.y) / dir.y;
    const double s_next = std::max(std::min(tx, ty), s);

    if (s_next >= length) {
      visit(CellIndex{i, j}, s, length - s);
      break;
    }
    if (s_next > s) visit(CellIndex{i, j}, s, s_next - s);

    const double guard = detail::kGrazingGuard * std::max(s_next, h_);
    if (tx <= s_next + guard) i += step_i;
    if (ty <= s_next + guard) j += step_j;
    s = s_next;
    if (i < 0 || i >= n_ || j < 0 || j >= n_) {
      out.exited = true;
      out.exit_param = s;
      break;
    }
  }
  return out;
}

inline Mesh build_mesh(double x_min, double y_min, double h, int n) { return Mesh(x_min, y_min, h, n); }

struct MaterialRegion {
  Rect box;
  double sigma_t = 0.0;
  double sigma_s = 0.0;

  friend bool operator==(const MaterialRegion&, const MaterialRegion&) = default;
};

/// Piecewise-constant cross sections, one value per cell.
struct MaterialField {
  std::vector<double> sigma_t;
  std::vector<double> sigma_s;

  /// Throws ConfigError unless sigma_t >= sigma_s >= 0 everywhere.
  void validate() const;
  bool scattering_free() const;
};

/// Paints regions in order by cell-centre containment; later regions win.
/// Cells no region covers are vacuum.
MaterialField paint_materials(const Mesh& mesh, std::span<const MaterialRegion> regions);

}  // namespace kinhybrid
