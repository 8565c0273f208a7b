#include "kinhybrid/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kinhybrid/errors.hpp"

namespace kinhybrid {


Mesh::Mesh(double x_min, double y_min, double h, int n) : x_min_(x_min), y_min_(y_min), h_(h), n_(n) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("mesh: cell size must be positive, got " + std::to_string(h));
  if (n < 1) throw ConfigError("mesh: need at least one cell per dimension, got " + std::to_string(n));
  if (!std::isfinite(x_min) || !std::isfinite(y_min)) throw ConfigError("mesh: origin must be finite");
}

std::optional<CellIndex> Mesh::cell_of(Point2 p) const {
  if (!contains(p)) return std::nullopt;
  const int i = std::min(static_cast<int>(std::floor((p.x - x_min_) / h_)), n_ - 1);
  const int j = std::min(static_cast<int>(std::floor((p.y - y_min_) / h_)), n_ - 1);
  return CellIndex{std::max(i, 0), std::max(j, 0)};
}

RayTrace Mesh::trace_ray(Point2 origin, Point2 dir, double length) const {
  RayTrace out;
  const RayExit e = walk_ray(origin, dir, length, [&](CellIndex c, double entry, double len) {
    out.segments.push_back({c, entry, len});
  });
  out.exited = e.exited;
  out.exit_param = e.exit_param;
  return out;
}

void MaterialField::validate() const {
  if (sigma_t.size() != sigma_s.size()) throw ConfigError("materials: sigma_t and sigma_s sizes differ");
  for (std::size_t c = 0; c < sigma_t.size(); ++c) {
    if (!(sigma_s[c] >= 0.0) || !(sigma_t[c] >= sigma_s[c]) || !std::isfinite(sigma_t[c])) {
      throw ConfigError("materials: need sigma_t >= sigma_s >= 0 in cell " + std::to_string(c));
    }
  }
}

bool MaterialField::scattering_free() const {
  return std::all_of(sigma_s.begin(), sigma_s.end(), [](double s) { return s == 0.0; });
}

MaterialField paint_materials(const Mesh& mesh, std::span<const MaterialRegion> regions) {
  MaterialField field;
  field.sigma_t.assign(mesh.cell_count(), 0.0);
  field.sigma_s.assign(mesh.cell_count(), 0.0);
  for (const auto& region : regions) {
    for (int j = 0; j < mesh.n(); ++j) {
      for (int i = 0; i < mesh.n(); ++i) {
        if (!region.box.contains(mesh.center({i, j}))) continue;
        field.sigma_t[mesh.index(i, j)] = region.sigma_t;
        field.sigma_s[mesh.index(i, j)] = region.sigma_s;
      }
    }
  }
  field.validate();
  return field;
}

}  // namespace kinhybrid
