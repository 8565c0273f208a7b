#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/sn_dg.hpp"
#include "oracles/dg_oracle.hpp"

using namespace kinhybrid;

namespace {

DgField constant_field(std::size_t nq, std::size_t cells, double v) {
  DgField f(nq, cells);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t c = 0; c < cells; ++c) f.coeffs(q, c)[0] = v;
  return f;
}

double max_abs_diff(const Mat4& a, const Eigen::Matrix4d& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("mass diagonal and constant-mode entries") {
  const double h = 0.3;
  const Vec4 m = mass_diagonal(h);
  CHECK(m[0] == doctest::Approx(h * h));
  CHECK(m[1] == doctest::Approx(h * h / 3));
  CHECK(m[3] == doctest::Approx(h * h / 9));
  const auto cm = assemble_cell_matrices(h, {0.6, -0.3, std::sqrt(1 - 0.45)}, 2.5, 1.5);
  CHECK(cm.advection(0, 0) == doctest::Approx(2.5 * h * h));
  CHECK(cm.scattering(0, 0) == doctest::Approx(1.5 * h * h));
  for (int k = 1; k < 4; ++k) CHECK(cm.scattering(0, k) == 0.0);
}

TEST_CASE("element matrices match the tensor quadrature oracle") {
  const double c = std::sqrt(0.5);
  const Direction3 dirs[] = {{0.5, 0.5, c}, {-0.5, 0.5, c}, {0.5, -0.5, c}, {-0.3, -0.7, std::sqrt(1 - 0.58)}};
  for (double h : {1.0, 0.37}) {
    for (const auto& o : dirs) {
      const auto m = assemble_cell_matrices(h, o, 1.0, 0.0);
      const auto ref = oracle::local_by_quadrature(h, o.x, o.y, 1.0);
      CHECK(max_abs_diff(m.advection + m.outflow, ref.lhs) < 1e-12);
      CHECK(max_abs_diff(m.inflow_x, ref.in_x) < 1e-12);
      CHECK(max_abs_diff(m.inflow_y, ref.in_y) < 1e-12);
    }
  }
}

TEST_CASE("sweep order follows the ordinate quadrant") {
  const Mesh m(0, 0, 1, 3);
  const auto pp = build_sweep_order(m, {0.5, 0.5, 0.7});
  CHECK(pp.cells.front() == m.index(0, 0));
  CHECK(pp.cells[1] == m.index(1, 0));
  CHECK(pp.cells[3] == m.index(0, 1));
  const auto mp = build_sweep_order(m, {-0.5, 0.5, 0.7});
  CHECK(mp.cells.front() == m.index(2, 0));
  CHECK_THROWS_AS(build_sweep_order(m, {0.0, 0.6, 0.8}), ConfigError);
  CHECK_THROWS_AS(build_sweep_order(m, {0.6, 0.0, 0.8}), ConfigError);
}

TEST_CASE("sweep order satisfies upwind dependencies exhaustively") {
  const Mesh m(0, 0, 1, 3);
  for (double sx : {1.0, -1.0}) {
    for (double sy : {1.0, -1.0}) {
      const auto order = build_sweep_order(m, {0.5 * sx, 0.5 * sy, 0.7});
      CHECK(order.cells.size() == 9u);
      std::set<std::size_t> seen;
      for (std::size_t cell : order.cells) {
        const auto ij = m.cell(cell);
        const int ui = ij.i - static_cast<int>(sx), uj = ij.j - static_cast<int>(sy);
        if (ui >= 0 && ui < 3) CHECK(seen.count(m.index(ui, ij.j)) == 1);
        if (uj >= 0 && uj < 3) CHECK(seen.count(m.index(ij.i, uj)) == 1);
        seen.insert(cell);
      }
      CHECK(seen.size() == 9u);
    }
  }
}

TEST_CASE("pure absorber converges in at most two sweeps") {
  const Mesh m(0, 0, 0.25, 4);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(16, 2.0), std::vector<double>(16, 0.0)};
  const std::vector<double> iso(16, 1.0);
  const auto r = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 16));
  CHECK(r.iterations <= 2);
}

TEST_CASE("single cell sweep equals the dense local solve") {
  const Mesh m(0, 0, 1, 1);
  const QuadratureSet q(4);
  MaterialField mat{{1.5}, {0.0}};
  const std::vector<double> iso{0.8};
  const auto r = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 1));
  for (std::size_t k = 0; k < q.size(); ++k) {
    const auto cm = assemble_cell_matrices(1.0, q.ordinate(k), 1.5, 0.0);
    Vec4 s = Vec4::Zero();
    s[0] = 0.8 * 1.0;
    const Vec4 x = (cm.advection + cm.outflow).fullPivLu().solve(s);
    const auto got = r.field.coeffs(k, 0);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(got[static_cast<std::size_t>(i)] - x[i]) < 1e-12);
  }
}

TEST_CASE("source iteration matches the global dense system") {
  const int n = 4;
  const double h = 0.25;
  const Mesh m(0, 0, h, n);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(16, 1.0), std::vector<double>(16, 1.0)};
  const std::vector<double> iso(16, 1.0);
  SolveOptions opt;
  opt.tolerance = 1e-4;
  const auto r = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 16), opt);
  const auto ref = oracle::global_dense_solve(n, h, q, 1.0, 1.0, 1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - r.field.data()[i]));
  CHECK(err < 10 * opt.tolerance);
  CHECK(r.iterations > 2);
}

TEST_CASE("one more sweep of a converged field changes it by at most delta") {
  const Mesh m(0, 0, 0.25, 4);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(16, 1.0), std::vector<double>(16, 0.9)};
  const std::vector<double> iso(16, 1.0);
  const SnSolver solver(m, q, mat.sigma_t, mat.sigma_s);
  SolveOptions opt;
  const auto r = solver.solve({iso, nullptr, 1.0}, nullptr, DgField(q.size(), 16), opt);
  DgField next;
  const double change = solver.sweep({iso, nullptr, 1.0}, nullptr, r.field, next);
  CHECK(change <= opt.tolerance);
}

TEST_CASE("zero inflow data is the same as no inflow") {
  const Mesh m(0, 0, 0.25, 4);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(16, 1.0), std::vector<double>(16, 0.5)};
  const std::vector<double> iso(16, 1.0);
  const InflowFn zero = [](std::size_t, Side, Point2) { return 0.0; };
  const auto a = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 16));
  const auto b = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, &zero, DgField(q.size(), 16));
  CHECK(a.field.data() == b.field.data());
}

TEST_CASE("parallel ordinate sweeps are identical to sequential") {
  const Mesh m(0, 0, 0.1, 10);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(100, 1.0), std::vector<double>(100, 0.7)};
  const std::vector<double> iso(100, 1.0);
  SolveOptions seq, par;
  par.workers = 3;
  const auto a = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 100), seq);
  const auto b = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 100), par);
  CHECK(a.iterations == b.iterations);
  CHECK(a.field.data() == b.field.data());
}

TEST_CASE("cell update counter is 4 per cell per ordinate per sweep") {
  const Mesh m(0, 0, 0.25, 4);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(16, 1.0), std::vector<double>(16, 0.5)};
  const std::vector<double> iso(16, 1.0);
  const auto r = source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 16));
  CHECK(r.cell_updates == 4ull * 16 * 16 * static_cast<std::uint64_t>(r.iterations));
}

TEST_CASE("iteration cap raises NonConvergenceError") {
  const Mesh m(0, 0, 10, 4);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(16, 1.0), std::vector<double>(16, 1.0)};
  const std::vector<double> iso(16, 1.0);
  SolveOptions opt;
  opt.max_iterations = 3;
  opt.tolerance = 1e-12;
  try {
    source_iteration_solve(m, mat, q, {iso, nullptr, 1.0}, nullptr, DgField(q.size(), 16), opt);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.last_error() > opt.tolerance);
  }
}

TEST_CASE("sweeps reject quadratures with axis ordinates") {
  const Mesh m(0, 0, 1, 2);
  CHECK_THROWS_AS(SnSolver(m, QuadratureSet(2), std::vector<double>(4, 1.0), std::vector<double>(4, 0.0)), ConfigError);
}

TEST_CASE("implicit step of a zero problem stays zero") {
  const Mesh m(0, 0, 0.25, 4);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(16, 1.0), std::vector<double>(16, 0.5)};
  const auto r = implicit_step(DgField(q.size(), 16), m, mat, q, {}, nullptr, 0.1);
  CHECK(r.iterations <= 2);
  for (double v : r.field.data()) CHECK(v == 0.0);
}

TEST_CASE("implicit step decays a uniform field with matched inflow") {
  const Mesh m(0, 0, 1, 1);
  const QuadratureSet q(4);
  MaterialField mat{{1.0}, {0.0}};
  const InflowFn matched = [](std::size_t, Side, Point2) { return 2.0 / 3.0; };
  const auto r = implicit_step(constant_field(q.size(), 1, 1.0), m, mat, q, {}, &matched, 0.5);
  for (std::size_t k = 0; k < q.size(); ++k) {
    CHECK(std::abs(r.field.coeffs(k, 0)[0] - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(r.field.coeffs(k, 0)[1]) < 1e-12);
  }
}

TEST_CASE("manufactured linear solution is reproduced") {
  // u = 1 + 0.5 x for every ordinate on [0,1]^2, pure absorber lambda = 2.
  const int n = 5;
  const double h = 0.2;
  const Mesh m(0, 0, h, n);
  const QuadratureSet q(4);
  MaterialField mat{std::vector<double>(25, 2.0), std::vector<double>(25, 0.0)};
  DgField src(q.size(), 25);
  for (std::size_t k = 0; k < q.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto c = src.coeffs(k, m.index(i, j));
        c[0] = 0.5 * q.ordinate(k).x + 2.0 * (1.0 + 0.5 * m.center_x(i));
        c[1] = 2.0 * 0.5 * h / 2;
      }
    }
  }
  const InflowFn exact = [](std::size_t, Side, Point2 p) { return 1.0 + 0.5 * p.x; };
  SweepSource s;
  s.field = &src;
  const auto r = source_iteration_solve(m, mat, q, s, &exact, DgField(q.size(), 25));
  for (std::size_t k = 0; k < q.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(std::abs(r.field.coeffs(k, m.index(i, j))[0] - (1.0 + 0.5 * m.center_x(i))) < 1e-10);
      }
    }
  }
}

TEST_CASE("scalar_flux_dg") {
  const QuadratureSet q(4);
  const auto iso = scalar_flux_dg(constant_field(16, 3, 1.0), q);
  for (double v : iso.phi) CHECK(v == doctest::Approx(4 * kPi).epsilon(1e-13));
  for (const auto& mm : iso.mean) CHECK(mm[0] == doctest::Approx(1.0).epsilon(1e-13));
  const auto zero = scalar_flux_dg(DgField(16, 3), q);
  for (double v : zero.phi) CHECK(v == 0.0);
  DgField ox(16, 2);
  for (std::size_t k = 0; k < 16; ++k)
    for (std::size_t c = 0; c < 2; ++c) ox.coeffs(k, c)[0] = q.ordinate(k).x;
  for (double v : scalar_flux_dg(ox, q).phi) CHECK(std::abs(v) < 1e-12);
  CHECK_THROWS_AS(scalar_flux_dg(DgField(4, 2), q), ContractViolation);
}

TEST_CASE("project_isotropic is exact for bilinear densities") {
  const Mesh m(-1, 0, 0.5, 4);
  // f = (1 + 2x)(3 - y) / 2
  SeparableMoments mom;
  mom.x = [](double a, double b) -> std::array<double, 2> {
    return {(b - a) + (b * b - a * a), (b * b - a * a) / 2 + 2 * (b * b * b - a * a * a) / 3};
  };
  mom.y = [](double a, double b) -> std::array<double, 2> {
    return {3 * (b - a) - (b * b - a * a) / 2, 3 * (b * b - a * a) / 2 - (b * b * b - a * a * a) / 3};
  };
  mom.scale = 0.5;
  const auto f = project_isotropic(m, 2, mom);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const auto c = f.coeffs(1, m.index(i, j));
      const double xc = m.center_x(i), yc = m.center_y(j);
      for (double xi : {-1.0, 0.3, 1.0}) {
        for (double eta : {-0.4, 1.0}) {
          const double x = xc + 0.25 * xi, y = yc + 0.25 * eta;
          CHECK(evaluate_q1(c, xi, eta) == doctest::Approx(0.5 * (1 + 2 * x) * (3 - y)).epsilon(1e-12));
        }
      }
    }
  }
}
