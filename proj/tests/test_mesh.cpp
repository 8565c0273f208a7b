#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/mesh.hpp"
#include "oracles/mc_oracle.hpp"

using namespace kinhybrid;

TEST_CASE("build_mesh extents") {
  const Mesh line = build_mesh(-1.5, -1.5, 3.0 / 51, 51);
  CHECK(line.x_max() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(line.cell_count() == 51u * 51u);

  const Mesh unit = build_mesh(0, 0, 1, 1);
  CHECK(unit.cell_count() == 1u);
  CHECK(unit.x_max() == 1.0);

  const Mesh hohl = build_mesh(0, 0, 1.3 / 52, 52);
  CHECK(hohl.y_max() == doctest::Approx(1.3).epsilon(1e-14));
}

TEST_CASE("build_mesh rejects bad sizes") {
  CHECK_THROWS_AS(build_mesh(0, 0, 0.0, 4), ConfigError);
  CHECK_THROWS_AS(build_mesh(0, 0, -1.0, 4), ConfigError);
  CHECK_THROWS_AS(build_mesh(0, 0, 1.0, 0), ConfigError);
}

TEST_CASE("cell_of tie-break and outside") {
  const Mesh m(0, 0, 0.5, 2);
  CHECK(*m.cell_of({0.25, 0.25}) == CellIndex{0, 0});
  CHECK(*m.cell_of({0.5, 0.25}) == CellIndex{1, 0});
  CHECK(*m.cell_of({0.5, 0.5}) == CellIndex{1, 1});
  CHECK(*m.cell_of({1.0, 1.0}) == CellIndex{1, 1});
  CHECK_FALSE(m.cell_of({1.5, 0.5}).has_value());
  CHECK_FALSE(m.cell_of({-1e-9, 0.5}).has_value());
}

TEST_CASE("trace_ray axis aligned") {
  const Mesh m(0, 0, 0.5, 2);
  auto t = m.trace_ray({0.25, 0.25}, {1, 0}, 0.5);
  REQUIRE(t.segments.size() == 2);
  CHECK(t.segments[0].cell == CellIndex{0, 0});
  CHECK(t.segments[0].length == doctest::Approx(0.25));
  CHECK(t.segments[1].cell == CellIndex{1, 0});
  CHECK(t.segments[1].length == doctest::Approx(0.25));
  CHECK_FALSE(t.exited);

  t = m.trace_ray({0.25, 0.25}, {1, 0}, 0.1);
  REQUIRE(t.segments.size() == 1);
  CHECK(t.segments[0].length == doctest::Approx(0.1));

  CHECK(m.trace_ray({0.25, 0.25}, {1, 0}, 0.0).segments.empty());
}

TEST_CASE("trace_ray diagonal against fine-step binning") {
  const Mesh m(0, 0, 0.5, 2);
  const double c = 1.0 / std::sqrt(2.0);
  const auto t = m.trace_ray({0.25, 0.25}, {c, c}, 1.0);
  const auto binned = oracle::bin_ray(0.25, 0.25, 0.5, 2, c, c, 1.0);
  double covered = 0.0;
  for (const auto& seg : t.segments) {
    const auto it = binned.find({seg.cell.i, seg.cell.j});
    REQUIRE(it != binned.end());
    CHECK(std::abs(seg.length - it->second) < 1e-5);
    covered += seg.length;
  }
  CHECK(binned.size() == t.segments.size());
  CHECK_FALSE(t.exited);  // the exit corner is 0.75 sqrt(2) away
  CHECK(covered == doctest::Approx(1.0));

  const auto longer = m.trace_ray({0.25, 0.25}, {c, c}, 2.0);
  CHECK(longer.exited);
  CHECK(longer.exit_param == doctest::Approx(0.75 * std::sqrt(2.0)));
}

TEST_CASE("trace_ray oracle on a finer grid with a shallow angle") {
  const Mesh m(0, 0, 0.1, 10);
  const double ox = std::cos(0.3) * 0.8, oy = std::sin(0.3) * 0.8;  // planar norm < 1
  const auto t = m.trace_ray({0.05, 0.13}, {ox, oy}, 1.0);
  const auto ref = oracle::bin_ray(0.05, 0.13, 0.1, 10, ox, oy, 1.0);
  REQUIRE(ref.size() == t.segments.size());
  for (const auto& seg : t.segments) CHECK(std::abs(seg.length - ref.at({seg.cell.i, seg.cell.j})) < 1e-5);
}

TEST_CASE("trace_ray length sum and adjacency") {
  const Mesh m(0, 0, 0.01, 100);
  for (int k = 0; k < 50; ++k) {
    const double ang = 0.1 + 0.123 * k;
    const Point2 d{0.9 * std::cos(ang), 0.9 * std::sin(ang)};
    const double len = 0.3;
    const auto t = m.trace_ray({0.5, 0.5}, d, len);
    REQUIRE_FALSE(t.exited);
    double sum = 0.0;
    for (std::size_t s = 0; s < t.segments.size(); ++s) {
      sum += t.segments[s].length;
      CHECK(t.segments[s].length > 0.0);
      if (s > 0) {
        const auto a = t.segments[s - 1].cell, b = t.segments[s].cell;
        CHECK(std::abs(a.i - b.i) <= 1);
        CHECK(std::abs(a.j - b.j) <= 1);
        CHECK(t.segments[s].entry == doctest::Approx(t.segments[s - 1].entry + t.segments[s - 1].length));
      }
    }
    CHECK(std::abs(sum - len) <= 8 * std::numeric_limits<double>::epsilon() * len);
  }
}

TEST_CASE("trace_ray through a corner and from a face") {
  const Mesh m(0, 0, 0.5, 2);
  const double c = 1.0 / std::sqrt(2.0);
  const auto t = m.trace_ray({0.0, 0.0}, {c, c}, std::sqrt(2.0));
  REQUIRE(t.segments.size() == 2);
  CHECK(t.segments[0].cell == CellIndex{0, 0});
  CHECK(t.segments[1].cell == CellIndex{1, 1});

  // starting on an interior face moving -x belongs to the left cell
  const auto back = m.trace_ray({0.5, 0.25}, {-1, 0}, 0.2);
  REQUIRE(back.segments.size() == 1);
  CHECK(back.segments[0].cell == CellIndex{0, 0});

  // on the right boundary moving out: exits immediately
  const auto out = m.trace_ray({1.0, 0.25}, {1, 0}, 0.2);
  CHECK(out.exited);
  CHECK(out.segments.empty());
}

TEST_CASE("trace_ray is deterministic") {
  const Mesh m(-1, -1, 0.02, 100);
  const auto a = m.trace_ray({0.1234, -0.5}, {0.3, 0.77}, 1.7);
  const auto b = m.trace_ray({0.1234, -0.5}, {0.3, 0.77}, 1.7);
  REQUIRE(a.segments.size() == b.segments.size());
  for (std::size_t k = 0; k < a.segments.size(); ++k) {
    CHECK(a.segments[k].cell == b.segments[k].cell);
    CHECK(a.segments[k].length == b.segments[k].length);
  }
}

TEST_CASE("paint_materials later regions win") {
  const Mesh m(0, 0, 1, 4);
  const std::vector<MaterialRegion> regions = {{{0, 0, 4, 4}, 1.0, 0.5}, {{1, 1, 3, 3}, 5.0, 0.0}};
  const auto f = paint_materials(m, regions);
  CHECK(f.sigma_t[m.index(0, 0)] == 1.0);
  CHECK(f.sigma_s[m.index(0, 0)] == 0.5);
  CHECK(f.sigma_t[m.index(1, 1)] == 5.0);
  CHECK(f.sigma_s[m.index(2, 2)] == 0.0);
  CHECK_FALSE(f.scattering_free());

  const std::vector<MaterialRegion> bad = {{{0, 0, 4, 4}, 1.0, 2.0}};
  CHECK_THROWS_AS(paint_materials(m, bad), ConfigError);
  const auto empty = paint_materials(m, {});
  CHECK(empty.scattering_free());
  CHECK(empty.sigma_t[5] == 0.0);
}
