#include "kinhybrid/sn_dg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/parallel.hpp"

namespace kinhybrid {

namespace {

// int_{-1}^{1} P_m P_n
double legendre_gram(int m, int n) { return m == n ? 2.0 / (2.0 * m + 1.0) : 0.0; }

// int_{-1}^{1} P_m' P_n
double legendre_derivative(int m, int n) { return (m == 1 && n == 0) ? 2.0 : 0.0; }

// P_m(+1) or P_m(-1)
double legendre_end(int m, int side) { return (side > 0 || m == 0) ? 1.0 : -1.0; }

int sign_of(double v) { return v > 0.0 ? 1 : -1; }

constexpr double kAxisTolerance = 1e-12;

}  // namespace

Vec4 mass_diagonal(double h) {
  Vec4 m;
  for (int k = 0; k < 4; ++k) {
    m[k] = h * h / ((2.0 * kBasis[k][0] + 1.0) * (2.0 * kBasis[k][1] + 1.0));
  }
  return m;
}

double evaluate_q1(std::span<const double, 4> c, double xi, double eta) {
  return c[0] + c[1] * xi + c[2] * eta + c[3] * xi * eta;
}

CellMatrices assemble_cell_matrices(double h, const Direction3& omega, double lambda_t, double lambda_s) {
  const double s = 0.5 * h;
  const double a = omega.x;
  const double b = omega.y;
  const int sx = sign_of(a);
  const int sy = sign_of(b);
  CellMatrices m;
  for (int l = 0; l < 4; ++l) {
    const int l1 = kBasis[l][0];
    const int l2 = kBasis[l][1];
    for (int k = 0; k < 4; ++k) {
      const int k1 = kBasis[k][0];
      const int k2 = kBasis[k][1];
      const double gx = legendre_gram(l1, k1);
      const double gy = legendre_gram(l2, k2);
      m.advection(l, k) = -a * s * legendre_derivative(l1, k1) * gy - b * s * gx * legendre_derivative(l2, k2) +
                          lambda_t * s * s * gx * gy;
      m.outflow(l, k) = std::abs(a) * s * legendre_end(l1, sx) * legendre_end(k1, sx) * gy +
                        std::abs(b) * s * gx * legendre_end(l2, sy) * legendre_end(k2, sy);
      m.scattering(l, k) = lambda_s * s * s * gx * gy;
      // Test trace on this cell's inflow face, trial trace on the upstream
      // neighbour's opposite (outflow) face.
      m.inflow_x(l, k) = std::abs(a) * s * legendre_end(l1, -sx) * legendre_end(k1, sx) * gy;
      m.inflow_y(l, k) = std::abs(b) * s * gx * legendre_end(l2, -sy) * legendre_end(k2, sy);
    }
  }
  return m;
}

SweepOrder build_sweep_order(const Mesh& mesh, const Direction3& omega) {
  if (std::abs(omega.x) <= kAxisTolerance || std::abs(omega.y) <= kAxisTolerance) {
    throw ConfigError("sweep: ordinate is aligned with a coordinate axis; the upwind order is ambiguous");
  }
  SweepOrder order;
  order.step_i = sign_of(omega.x);
  order.step_j = sign_of(omega.y);
  const int n = mesh.n();
  order.cells.reserve(mesh.cell_count());
  for (int jj = 0; jj < n; ++jj) {
    const int j = order.step_j > 0 ? jj : n - 1 - jj;
    for (int ii = 0; ii < n; ++ii) {
      const int i = order.step_i > 0 ? ii : n - 1 - ii;
      order.cells.push_back(mesh.index(i, j));
    }
  }
  return order;
}

SnSolver::SnSolver(const Mesh& mesh, const QuadratureSet& quad, std::vector<double> lambda_t,
                   std::vector<double> lambda_s)
    : mesh_(mesh), quad_(quad), lambda_t_(std::move(lambda_t)), lambda_s_(std::move(lambda_s)), mass_(mass_diagonal(mesh.h())) {
  if (lambda_t_.size() != mesh_.cell_count() || lambda_s_.size() != mesh_.cell_count()) {
    throw ContractViolation("SnSolver: cross-section arrays must have one entry per cell");
  }
  std::map<double, std::size_t> classes;
  class_of_cell_.resize(mesh_.cell_count());
  std::vector<double> class_lambda;
  for (std::size_t c = 0; c < lambda_t_.size(); ++c) {
    if (!(lambda_t_[c] >= 0.0) || !(lambda_s_[c] >= 0.0)) {
      throw ConfigError("SnSolver: cross sections must be non-negative");
    }
    auto [it, inserted] = classes.try_emplace(lambda_t_[c], class_lambda.size());
    if (inserted) class_lambda.push_back(lambda_t_[c]);
    class_of_cell_[c] = it->second;
  }

  const std::size_t nq = quad_.size();
  inverses_.resize(class_lambda.size() * nq);
  inflow_x_.resize(nq);
  inflow_y_.resize(nq);
  orders_.reserve(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const Direction3& omega = quad_.ordinate(q);
    orders_.push_back(build_sweep_order(mesh_, omega));
    const CellMatrices coupling = assemble_cell_matrices(mesh_.h(), omega, 0.0, 0.0);
    inflow_x_[q] = coupling.inflow_x;
    inflow_y_[q] = coupling.inflow_y;
    for (std::size_t cls = 0; cls < class_lambda.size(); ++cls) {
      const CellMatrices m = assemble_cell_matrices(mesh_.h(), omega, class_lambda[cls], 0.0);
      inverses_[cls * nq + q] = Eigen::PartialPivLU<Mat4>(m.advection + m.outflow).inverse();
    }
  }
}

std::vector<SnSolver::BoundaryLoads> SnSolver::boundary_loads(const InflowFn* inflow) const {
  std::vector<BoundaryLoads> loads;
  if (inflow == nullptr || !*inflow) return loads;
  const GaussRule rule = gauss_legendre(4);
  const int n = mesh_.n();
  const double s = 0.5 * mesh_.h();
  loads.resize(quad_.size());
  for (std::size_t q = 0; q < quad_.size(); ++q) {
    const Direction3& omega = quad_.ordinate(q);
    const SweepOrder& order = orders_[q];
    auto& out = loads[q];
    out.x_face.assign(static_cast<std::size_t>(n), Vec4::Zero());
    out.y_face.assign(static_cast<std::size_t>(n), Vec4::Zero());
    // x-inflow face: Left when moving +x, Right when moving -x.
    const Side x_side = order.step_i > 0 ? Side::Left : Side::Right;
    const double x_face = order.step_i > 0 ? mesh_.x_min() : mesh_.x_max();
    const Side y_side = order.step_j > 0 ? Side::Bottom : Side::Top;
    const double y_face = order.step_j > 0 ? mesh_.y_min() : mesh_.y_max();
    for (int t = 0; t < n; ++t) {
      Vec4 bx = Vec4::Zero();
      Vec4 by = Vec4::Zero();
      for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double u = rule.nodes[g];
        const double w = rule.weights[g];
        const double vx = (*inflow)(q, x_side, {x_face, mesh_.center_y(t) + s * u});
        const double vy = (*inflow)(q, y_side, {mesh_.center_x(t) + s * u, y_face});
        for (int l = 0; l < 4; ++l) {
          const int l1 = kBasis[l][0];
          const int l2 = kBasis[l][1];
          bx[l] += w * vx * legendre_end(l1, -order.step_i) * (l2 == 0 ? 1.0 : u);
          by[l] += w * vy * (l1 == 0 ? 1.0 : u) * legendre_end(l2, -order.step_j);
        }
      }
      out.x_face[static_cast<std::size_t>(t)] = std::abs(omega.x) * s * bx;
      out.y_face[static_cast<std::size_t>(t)] = std::abs(omega.y) * s * by;
    }
  }
  return loads;
}

void SnSolver::sweep_ordinate(std::size_t q, const SweepSource& source, const BoundaryLoads* loads,
                              std::span<const std::array<double, 4>> mean, DgField& out, double& max_change) const {
  const SweepOrder& order = orders_[q];
  const Mat4& mx = inflow_x_[q];
  const Mat4& my = inflow_y_[q];
  const int n = mesh_.n();
  const std::size_t nq = quad_.size();
  const bool has_iso = !source.isotropic.empty();
  for (const std::size_t cell : order.cells) {
    const CellIndex ij = mesh_.cell(cell);
    Vec4 rhs;
    const double ls = lambda_s_[cell];
    for (int k = 0; k < 4; ++k) rhs[k] = ls * mass_[k] * mean[cell][static_cast<std::size_t>(k)];
    if (has_iso) rhs[0] += mass_[0] * source.isotropic[cell];
    if (source.field != nullptr) {
      const auto sc = source.field->coeffs(q, cell);
      for (int k = 0; k < 4; ++k) rhs[k] += source.field_scale * mass_[k] * sc[static_cast<std::size_t>(k)];
    }
    const int up_i = ij.i - order.step_i;
    const int up_j = ij.j - order.step_j;
    if (up_i >= 0 && up_i < n) {
      const auto up = out.coeffs(q, mesh_.index(up_i, ij.j));
      rhs.noalias() += mx * Eigen::Map<const Vec4>(up.data());
    } else if (loads != nullptr) {
      rhs += loads->x_face[static_cast<std::size_t>(ij.j)];
    }
    if (up_j >= 0 && up_j < n) {
      const auto up = out.coeffs(q, mesh_.index(ij.i, up_j));
      rhs.noalias() += my * Eigen::Map<const Vec4>(up.data());
    } else if (loads != nullptr) {
      rhs += loads->y_face[static_cast<std::size_t>(ij.i)];
    }
    const Vec4 next = inverses_[class_of_cell_[cell] * nq + q] * rhs;
    auto dst = out.coeffs(q, cell);
    for (int k = 0; k < 4; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      max_change = std::max(max_change, std::abs(next[k] - dst[kk]));
      dst[kk] = next[k];
    }
  }
}

double SnSolver::sweep(const SweepSource& source, const InflowFn* inflow, const DgField& lagged, DgField& out,
                       int workers) const {
  const auto loads = boundary_loads(inflow);
  const ScalarFluxDg moments = scalar_flux_dg(lagged, quad_);
  if (&out != &lagged) out = lagged;
  const std::size_t nq = quad_.size();
  std::vector<double> change(static_cast<std::size_t>(std::max(1, workers)), 0.0);
  for_each_chunk(nq, workers, [&](std::size_t begin, std::size_t end, int w) {
    for (std::size_t q = begin; q < end; ++q) {
      sweep_ordinate(q, source, loads.empty() ? nullptr : &loads[q], moments.mean, out, change[static_cast<std::size_t>(w)]);
    }
  });
  return *std::max_element(change.begin(), change.end());
}

SolveResult SnSolver::solve(const SweepSource& source, const InflowFn* inflow, DgField initial,
                            const SolveOptions& options) const {
  if (initial.ordinates() != quad_.size() || initial.cells() != mesh_.cell_count()) {
    throw ContractViolation("SnSolver::solve: initial field has the wrong shape");
  }
  if (!source.isotropic.empty() && source.isotropic.size() != mesh_.cell_count()) {
    throw ContractViolation("SnSolver::solve: isotropic source needs one value per cell");
  }
  const auto loads = boundary_loads(inflow);
  const std::size_t nq = quad_.size();
  const std::uint64_t updates_per_sweep = 4ull * nq * mesh_.cell_count();
  const int workers = std::max(1, options.workers);

  SolveResult result;
  result.field = std::move(initial);
  double err = options.tolerance + 1.0;
  while (err > options.tolerance) {
    if (result.iterations >= options.max_iterations) {
      throw NonConvergenceError("source iteration did not converge after " + std::to_string(result.iterations) +
                                    " sweeps (last change " + std::to_string(err) + ")",
                                err, result.iterations);
    }
    // The scattering source lags one iteration; each ordinate only reads its
    // own upstream coefficients, so in-place updates see the lagged values
    // exactly once.
    const ScalarFluxDg moments = scalar_flux_dg(result.field, quad_);
    std::vector<double> change(static_cast<std::size_t>(workers), 0.0);
    for_each_chunk(nq, workers, [&](std::size_t begin, std::size_t end, int w) {
      for (std::size_t q = begin; q < end; ++q) {
        sweep_ordinate(q, source, loads.empty() ? nullptr : &loads[q], moments.mean, result.field,
                       change[static_cast<std::size_t>(w)]);
      }
    });
    err = *std::max_element(change.begin(), change.end());
    ++result.iterations;
    result.cell_updates += updates_per_sweep;
  }
  result.final_error = err;
  return result;
}

SolveResult source_iteration_solve(const Mesh& mesh, const MaterialField& effective, const QuadratureSet& quad,
                                   const SweepSource& source, const InflowFn* inflow, DgField initial,
                                   const SolveOptions& options) {
  const SnSolver solver(mesh, quad, effective.sigma_t, effective.sigma_s);
  return solver.solve(source, inflow, std::move(initial), options);
}

namespace {

std::vector<double> shifted(const std::vector<double>& sigma_t, double dt) {
  if (!(dt > 0.0)) throw ConfigError("implicit step: dt must be positive");
  std::vector<double> out(sigma_t);
  for (double& v : out) v += 1.0 / dt;
  return out;
}

}  // namespace

ImplicitStepper::ImplicitStepper(const Mesh& mesh, const MaterialField& materials, const QuadratureSet& quad, double dt)
    : dt_(dt), solver_(mesh, quad, shifted(materials.sigma_t, dt), materials.sigma_s) {}

SolveResult ImplicitStepper::step(const DgField& previous, std::span<const double> isotropic_source,
                                  const InflowFn* inflow, const SolveOptions& options) const {
  SweepSource source;
  source.isotropic = isotropic_source;
  source.field = &previous;
  source.field_scale = 1.0 / dt_;
  return solver_.solve(source, inflow, previous, options);
}

SolveResult implicit_step(const DgField& previous, const Mesh& mesh, const MaterialField& materials,
                          const QuadratureSet& quad, std::span<const double> isotropic_source,
                          const InflowFn* inflow, double dt, const SolveOptions& options) {
  const ImplicitStepper stepper(mesh, materials, quad, dt);
  return stepper.step(previous, isotropic_source, inflow, options);
}

ScalarFluxDg scalar_flux_dg(const DgField& field, const QuadratureSet& quad) {
  if (field.ordinates() != quad.size()) throw ContractViolation("scalar_flux_dg: ordinate count mismatch");
  ScalarFluxDg out;
  out.phi.assign(field.cells(), 0.0);
  out.mean.assign(field.cells(), {0.0, 0.0, 0.0, 0.0});
  for (std::size_t q = 0; q < field.ordinates(); ++q) {
    const double w = quad.weight(q);
    for (std::size_t c = 0; c < field.cells(); ++c) {
      const auto a = field.coeffs(q, c);
      for (std::size_t k = 0; k < 4; ++k) out.mean[c][k] += w * a[k];
    }
  }
  for (std::size_t c = 0; c < field.cells(); ++c) {
    out.phi[c] = out.mean[c][0];
    for (double& v : out.mean[c]) v /= kFourPi;
  }
  return out;
}

DgField project_isotropic(const Mesh& mesh, std::size_t ordinates, const SeparableMoments& moments) {
  DgField field(ordinates, mesh.cell_count());
  const double h = mesh.h();
  const Vec4 mass = mass_diagonal(h);
  std::vector<std::array<double, 2>> px(static_cast<std::size_t>(mesh.n()));
  std::vector<std::array<double, 2>> py(static_cast<std::size_t>(mesh.n()));
  for (int t = 0; t < mesh.n(); ++t) {
    const double x0 = mesh.x_min() + t * h;
    const double y0 = mesh.y_min() + t * h;
    const auto mx = moments.x(x0, x0 + h);
    const auto my = moments.y(y0, y0 + h);
    // Moments against P0 and P1((x - xc) / (h / 2)).
    px[static_cast<std::size_t>(t)] = {mx[0], (2.0 / h) * (mx[1] - mesh.center_x(t) * mx[0])};
    py[static_cast<std::size_t>(t)] = {my[0], (2.0 / h) * (my[1] - mesh.center_y(t) * my[0])};
  }
  for (int j = 0; j < mesh.n(); ++j) {
    for (int i = 0; i < mesh.n(); ++i) {
      std::array<double, 4> c{};
      for (int k = 0; k < 4; ++k) {
        c[static_cast<std::size_t>(k)] = moments.scale * px[static_cast<std::size_t>(i)][static_cast<std::size_t>(kBasis[k][0])] *
                                         py[static_cast<std::size_t>(j)][static_cast<std::size_t>(kBasis[k][1])] / mass[k];
      }
      for (std::size_t q = 0; q < ordinates; ++q) {
        auto dst = field.coeffs(q, mesh.index(i, j));
        std::copy(c.begin(), c.end(), dst.begin());
      }
    }
  }
  return field;
}

}  // namespace kinhybrid
