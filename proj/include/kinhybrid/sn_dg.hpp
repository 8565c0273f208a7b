#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kinhybrid/geometry.hpp"
#include "kinhybrid/mesh.hpp"
#include "kinhybrid/quadrature.hpp"

namespace kinhybrid {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// Q1 Legendre basis on a cell, phi_k(x, y) = P_k1(xi) P_k2(eta) with
/// xi = (x - x_i) / (h / 2). Index order: (0,0), (1,0), (0,1), (1,1).
inline constexpr std::array<std::array<int, 2>, 4> kBasis = {{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

/// Diagonal of the cell mass matrix: h^2 / ((2 k1 + 1)(2 k2 + 1)).
Vec4 mass_diagonal(double h);

/// Evaluates the Q1 expansion at local coordinates (xi, eta) in [-1, 1]^2.
double evaluate_q1(std::span<const double, 4> coeffs, double xi, double eta);

/// Element matrices of the upwind DG weak form for one cell and ordinate.
/// Rows index test functions, columns trial functions.
struct CellMatrices {
  Mat4 advection;   // A: -(Omega . grad v, u) + lambda_t (v, u)
  Mat4 outflow;     // P: outflow-face traces of the cell itself
  Mat4 scattering;  // R: lambda_s (v, u-bar)
  Mat4 inflow_x;    // M acting on the upstream x neighbour's coefficients
  Mat4 inflow_y;    // M acting on the upstream y neighbour's coefficients
};

/// Closed-form element matrices; every entry is an exact product of 1-D
/// Legendre integrals. Independent of the cell position, so only h enters.
CellMatrices assemble_cell_matrices(double h, const Direction3& omega, double lambda_t, double lambda_s);

enum class Side { Left, Right, Bottom, Top };

/// Cell visiting order for one ordinate: rows in the direction of sign(Omega_y),
/// cells within a row in the direction of sign(Omega_x).
struct SweepOrder {
  int step_i = 1;
  int step_j = 1;
  std::vector<std::size_t> cells;
};

/// Throws ConfigError for ordinates with a vanishing planar component.
SweepOrder build_sweep_order(const Mesh& mesh, const Direction3& omega);

/// Per-ordinate Q1 coefficients on every cell, laid out [q][cell][k].
class DgField {
 public:
  DgField() = default;
  DgField(std::size_t ordinates, std::size_t cells) : ordinates_(ordinates), cells_(cells), data_(ordinates * cells * 4, 0.0) {}

  std::size_t ordinates() const { return ordinates_; }
  std::size_t cells() const { return cells_; }

  std::span<double, 4> coeffs(std::size_t q, std::size_t cell) {
    return std::span<double, 4>(data_.data() + (q * cells_ + cell) * 4, 4);
  }
  std::span<const double, 4> coeffs(std::size_t q, std::size_t cell) const {
    return std::span<const double, 4>(data_.data() + (q * cells_ + cell) * 4, 4);
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

 private:
  std::size_t ordinates_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> data_;
};

/// Inflow data b_q on the domain boundary, evaluated where the caller wants
/// it in time. Called only for inflow faces (Omega_q . n < 0).
using InflowFn = std::function<double(std::size_t q, Side side, Point2 where)>;

/// Right-hand side s_q of the steady transport problem. `isotropic` holds a
/// per-cell constant (per steradian, identical for every ordinate); `field`
/// holds per-ordinate Q1 coefficients multiplied by `field_scale`. Either may be absent.
struct SweepSource {
  std::span<const double> isotropic;
  const DgField* field = nullptr;
  double field_scale = 1.0;
};

struct SolveOptions {
  double tolerance = 1e-4;
  int max_iterations = 10000;
  int workers = 1;
};

struct SolveResult {
  DgField field;
  int iterations = 0;
  double final_error = 0.0;
  std::uint64_t cell_updates = 0;  // 4 per cell visit, summed over sweeps
};

/// The steady upwind DG system for fixed (effective) cross sections:
/// Omega_q . grad u_q + lambda_t u_q = lambda_s u-bar + s_q, u_q = b_q on inflow.
/// Cells that share lambda_t share the factorised (A + P) per ordinate.
class SnSolver {
 public:
  SnSolver(const Mesh& mesh, const QuadratureSet& quad, std::vector<double> lambda_t, std::vector<double> lambda_s);

  const Mesh& mesh() const { return mesh_; }
  const QuadratureSet& quadrature() const { return quad_; }

  /// Source iteration with lagged scattering and full sweeps until
  /// max_q |alpha_q - beta_q|_inf <= tolerance. Throws NonConvergenceError.
  SolveResult solve(const SweepSource& source, const InflowFn* inflow, DgField initial, const SolveOptions& options) const;

  /// One sweep of every ordinate with the scattering source built from
  /// `lagged`. Returns the max coefficient change and writes into `out`.
  double sweep(const SweepSource& source, const InflowFn* inflow, const DgField& lagged, DgField& out,
               int workers = 1) const;

  /// Precomputed inverse of (A + P) for a cell and ordinate.
  const Mat4& local_inverse(std::size_t q, std::size_t cell) const {
    return inverses_[class_of_cell_[cell] * quad_.size() + q];
  }

 private:
  struct BoundaryLoads {
    std::vector<Vec4> x_face;  // indexed by j on the x-inflow side
    std::vector<Vec4> y_face;  // indexed by i on the y-inflow side
  };

  std::vector<BoundaryLoads> boundary_loads(const InflowFn* inflow) const;
  void sweep_ordinate(std::size_t q, const SweepSource& source, const BoundaryLoads* loads,
                      std::span<const std::array<double, 4>> mean, DgField& out, double& max_change) const;

  Mesh mesh_;
  QuadratureSet quad_;
  std::vector<double> lambda_t_;
  std::vector<double> lambda_s_;
  Vec4 mass_;
  std::vector<std::size_t> class_of_cell_;
  std::vector<Mat4> inverses_;  // [class][q]
  std::vector<Mat4> inflow_x_;  // [q]
  std::vector<Mat4> inflow_y_;  // [q]
  std::vector<SweepOrder> orders_;  // [q]
};

/// Effective cross sections already include any 1/dt shift.
SolveResult source_iteration_solve(const Mesh& mesh, const MaterialField& effective, const QuadratureSet& quad,
                                   const SweepSource& source, const InflowFn* inflow, DgField initial,
                                   const SolveOptions& options = {});

/// Backward-Euler step for a fixed dt: lambda_t <- lambda_t + 1/dt and
/// s_q <- s_q + u_q^n / dt, started from u^n.
class ImplicitStepper {
 public:
  ImplicitStepper(const Mesh& mesh, const MaterialField& materials, const QuadratureSet& quad, double dt);

  double dt() const { return dt_; }
  const SnSolver& solver() const { return solver_; }

  /// `isotropic_source` is per steradian and per cell (may be empty).
  SolveResult step(const DgField& previous, std::span<const double> isotropic_source, const InflowFn* inflow,
                   const SolveOptions& options) const;

 private:
  double dt_;
  SnSolver solver_;
};

SolveResult implicit_step(const DgField& previous, const Mesh& mesh, const MaterialField& materials,
                          const QuadratureSet& quad, std::span<const double> isotropic_source,
                          const InflowFn* inflow, double dt, const SolveOptions& options = {});

struct ScalarFluxDg {
  std::vector<double> phi;                       // sum_q w_q alpha_{q,(0,0)} per cell
  std::vector<std::array<double, 4>> mean;       // (1/4 pi) sum_q w_q alpha_{q,k}
};

ScalarFluxDg scalar_flux_dg(const DgField& field, const QuadratureSet& quad);

/// Exact L2 projection of a separable isotropic density
/// f(x, y) = scale * gx(x) * gy(y) onto Q1, copied to every ordinate. The
/// callbacks return the 1-D moments (int g, int g * x) over [a, b].
struct SeparableMoments {
  std::function<std::array<double, 2>(double a, double b)> x;
  std::function<std::array<double, 2>(double a, double b)> y;
  double scale = 1.0;
};
DgField project_isotropic(const Mesh& mesh, std::size_t ordinates, const SeparableMoments& moments);

}  // namespace kinhybrid
