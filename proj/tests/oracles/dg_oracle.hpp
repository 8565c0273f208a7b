#pragma once

// Brute-force references for the DG discretisation: element matrices by
// tensor Gauss quadrature of the weak form, and the global coupled system
// (all cells, ordinates and coefficients) solved densely.

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "kinhybrid/quadrature.hpp"

namespace oracle {

// Legendre P0, P1 and their derivatives in local coordinates.
inline double leg(int m, double t) { return m == 0 ? 1.0 : t; }
inline double dleg(int m, double) { return m == 0 ? 0.0 : 1.0; }

inline constexpr int kIdx[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};

inline double basis(int k, double xi, double eta) { return leg(kIdx[k][0], xi) * leg(kIdx[k][1], eta); }

struct Local {
  Eigen::Matrix4d lhs;  // volume + outflow faces
  Eigen::Matrix4d in_x; // coupling to upstream x neighbour
  Eigen::Matrix4d in_y;
  Eigen::Matrix4d mass;
};

// Cell [-h/2, h/2]^2, x = (h/2) xi. Rows are test functions.
inline Local local_by_quadrature(double h, double ox, double oy, double lambda_t, int points = 8) {
  const auto g = kinhybrid::gauss_legendre(points);
  const double s = h / 2;
  Local out;
  out.lhs.setZero();
  out.in_x.setZero();
  out.in_y.setZero();
  out.mass.setZero();
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      double vol = 0, mass = 0;
      for (std::size_t a = 0; a < g.nodes.size(); ++a) {
        for (std::size_t b = 0; b < g.nodes.size(); ++b) {
          const double xi = g.nodes[a], eta = g.nodes[b];
          const double w = g.weights[a] * g.weights[b] * s * s;
          // grad of the test function in physical units
          const double dx = dleg(kIdx[k][0], xi) * leg(kIdx[k][1], eta) / s;
          const double dy = leg(kIdx[k][0], xi) * dleg(kIdx[k][1], eta) / s;
          const double u = basis(l, xi, eta);
          vol += w * (-(ox * dx + oy * dy) * u + lambda_t * basis(k, xi, eta) * u);
          mass += w * basis(k, xi, eta) * u;
        }
      }
      double out_faces = 0, cx = 0, cy = 0;
      const double xo = ox > 0 ? 1 : -1;  // outflow side in xi
      const double yo = oy > 0 ? 1 : -1;
      for (std::size_t a = 0; a < g.nodes.size(); ++a) {
        const double t = g.nodes[a];
        const double w = g.weights[a] * s;
        out_faces += w * std::abs(ox) * basis(k, xo, t) * basis(l, xo, t);
        out_faces += w * std::abs(oy) * basis(k, t, yo) * basis(l, t, yo);
        // inflow face of this cell meets the upstream cell's outflow face
        cx += w * std::abs(ox) * basis(k, -xo, t) * basis(l, xo, t);
        cy += w * std::abs(oy) * basis(k, t, -yo) * basis(l, t, yo);
      }
      out.lhs(k, l) = vol + out_faces;
      out.mass(k, l) = mass;
      out.in_x(k, l) = cx;
      out.in_y(k, l) = cy;
    }
  }
  return out;
}

// Solves the steady problem with vacuum inflow on an n x n mesh of side h:
// Omega.grad u + lt u = ls ubar + src, with ubar = (1/4pi) sum w u.
// Returns coefficients laid out [q][cell][k], cell = j * n + i.
inline std::vector<double> global_dense_solve(int n, double h, const kinhybrid::QuadratureSet& quad, double lt,
                                              double ls, double src) {
  const int nq = static_cast<int>(quad.size());
  const int cells = n * n;
  const int dim = nq * cells * 4;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  auto id = [&](int q, int c, int k) { return (q * cells + c) * 4 + k; };
  for (int q = 0; q < nq; ++q) {
    const auto& o = quad.ordinate(static_cast<std::size_t>(q));
    const Local m = local_by_quadrature(h, o.x, o.y, lt);
    const int si = o.x > 0 ? 1 : -1;
    const int sj = o.y > 0 ? 1 : -1;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int c = j * n + i;
        for (int k = 0; k < 4; ++k) {
          rhs(id(q, c, k)) = src * m.mass(k, 0);
          for (int l = 0; l < 4; ++l) {
            K(id(q, c, k), id(q, c, l)) += m.lhs(k, l);
            const int ui = i - si, uj = j - sj;
            if (ui >= 0 && ui < n) K(id(q, c, k), id(q, j * n + ui, l)) -= m.in_x(k, l);
            if (uj >= 0 && uj < n) K(id(q, c, k), id(q, uj * n + i, l)) -= m.in_y(k, l);
            for (int r = 0; r < nq; ++r) {
              K(id(q, c, k), id(r, c, l)) -= ls * m.mass(k, l) * quad.weight(static_cast<std::size_t>(r)) /
                                             (4.0 * 3.14159265358979323846);
            }
          }
        }
      }
    }
  }
  Eigen::VectorXd x = K.partialPivLu().solve(rhs);
  return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace oracle
