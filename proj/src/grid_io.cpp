#include "kinhybrid/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/keyvalue.hpp"

namespace kinhybrid {

ScalarGrid make_grid(const Mesh& mesh, std::vector<double> values) {
  if (values.size() != mesh.cell_count()) throw ContractViolation("make_grid: value count does not match mesh");
  return {mesh.n(), mesh.h(), mesh.x_min(), mesh.y_min(), std::move(values)};
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void write_grid_csv(std::ostream& out, const ScalarGrid& grid) {
  const auto n = static_cast<std::size_t>(grid.n_x);
  if (grid.values.size() != n * n) throw ContractViolation("write_grid_csv: value count does not match n_x");
  out << grid.n_x << ',' << g17(grid.h) << ',' << g17(grid.x_min) << ',' << g17(grid.y_min) << '\n';
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out << ',';
      out << g17(grid.values[j * n + i]);
    }
    out << '\n';
  }
}

ScalarGrid read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("grid csv: empty input");
  const auto head = split_csv(line);
  if (head.size() != 4) throw ConfigError("grid csv: header must be N_x,h,x_min,y_min");
  ScalarGrid g;
  g.n_x = static_cast<int>(parse_int(head[0]));
  g.h = parse_double(head[1]);
  g.x_min = parse_double(head[2]);
  g.y_min = parse_double(head[3]);
  if (g.n_x < 1 || !(g.h > 0.0)) throw ConfigError("grid csv: bad header");
  const auto n = static_cast<std::size_t>(g.n_x);
  g.values.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::getline(in, line)) throw ConfigError("grid csv: expected " + std::to_string(n) + " rows");
    const auto row = split_csv(line);
    if (row.size() != n) throw ConfigError("grid csv: row " + std::to_string(j + 1) + " has wrong length");
    for (const auto& cell : row) g.values.push_back(parse_double(cell));
  }
  return g;
}

void write_grid_csv_file(const std::string& path, const ScalarGrid& grid) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write grid '" + path + "'");
  write_grid_csv(out, grid);
  if (!out) throw ConfigError("failed writing grid '" + path + "'");
}

ScalarGrid read_grid_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid '" + path + "'");
  return read_grid_csv(in);
}

}  // namespace kinhybrid
