#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kinhybrid/mesh.hpp"

namespace kinhybrid {

/// Cell values on a square grid, row-major with j (y) outer.
struct ScalarGrid {
  int n_x = 0;
  double h = 0.0;
  double x_min = 0.0;
  double y_min = 0.0;
  std::vector<double> values;

  Mesh mesh() const { return Mesh(x_min, y_min, h, n_x); }

  friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;
};

ScalarGrid make_grid(const Mesh& mesh, std::vector<double> values);

/// CSV: a header row "N_x,h,x_min,y_min", then N_x rows from the lowest y up,
/// each with N_x values of increasing x. 17 significant digits, so reading
/// back is bit-exact.
void write_grid_csv(std::ostream& out, const ScalarGrid& grid);
ScalarGrid read_grid_csv(std::istream& in);
void write_grid_csv_file(const std::string& path, const ScalarGrid& grid);
ScalarGrid read_grid_csv_file(const std::string& path);

}  // namespace kinhybrid
