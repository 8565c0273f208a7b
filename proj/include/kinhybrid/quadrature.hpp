#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kinhybrid/geometry.hpp"

namespace kinhybrid {

/// Product quadrature on the upper hemisphere (Gauss-Legendre in the polar
/// cosine, equal-weight midpoint azimuths). Weights are doubled so they
/// integrate over the full sphere of a z-symmetric field: sum of weights = 4 pi.
///
/// Ordinate q = j * N + l couples polar node j with azimuth l (both zero-based).
class QuadratureSet {
 public:
  explicit QuadratureSet(int level);

  int level() const { return level_; }
  std::size_t size() const { return ordinates_.size(); }
  const Direction3& ordinate(std::size_t q) const { return ordinates_[q]; }
  double weight(std::size_t q) const { return weights_[q]; }
  std::span<const Direction3> ordinates() const { return ordinates_; }
  std::span<const double> weights() const { return weights_; }

  /// (1 / 4 pi) * sum_q w_q values_q. Throws ContractViolation on a length mismatch.
  double angular_average(std::span<const double> values) const;

 private:
  int level_;
  std::vector<Direction3> ordinates_;
  std::vector<double> weights_;
};

inline QuadratureSet build_product_quadrature(int level) { return QuadratureSet(level); }

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace kinhybrid
