#include "kinhybrid/quadrature.hpp"

#include <cmath>
#include <string>

#include "kinhybrid/errors.hpp"

namespace kinhybrid {

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  // Nodes are symmetric; Newton on P_n from the Chebyshev-like initial guess.
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(k);
    const auto hi = static_cast<std::size_t>(n - 1 - k);
    rule.nodes[lo] = mid - half * x;
    rule.nodes[hi] = mid + half * x;
    rule.weights[lo] = half * w;
    rule.weights[hi] = half * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = mid;
  return rule;
}

QuadratureSet::QuadratureSet(int level) : level_(level) {
  if (level < 1) throw ConfigError("quadrature: level must be >= 1, got " + std::to_string(level));
  // Polar cosines on (0, 1); weights sum to one.
  const GaussRule polar = gauss_legendre(level, 0.0, 1.0);
  const double azimuth_weight = 2.0 * kPi / level;
  ordinates_.reserve(static_cast<std::size_t>(level) * static_cast<std::size_t>(level));
  weights_.reserve(ordinates_.capacity());
  for (int j = 0; j < level; ++j) {
    const double mu = polar.nodes[static_cast<std::size_t>(j)];
    const double sin_theta = std::sqrt(1.0 - mu * mu);
    for (int l = 0; l < level; ++l) {
      const double phi = 2.0 * kPi * (l + 0.5) / level;
      ordinates_.push_back({sin_theta * std::cos(phi), sin_theta * std::sin(phi), mu});
      weights_.push_back(2.0 * azimuth_weight * polar.weights[static_cast<std::size_t>(j)]);
    }
  }
}

double QuadratureSet::angular_average(std::span<const double> values) const {
  if (values.size() != weights_.size()) {
    throw ContractViolation("angular_average: expected " + std::to_string(weights_.size()) + " values, got " +
                            std::to_string(values.size()));
  }
  double sum = 0.0;
  for (std::size_t q = 0; q < values.size(); ++q) sum += weights_[q] * values[q];
  return sum / kFourPi;
}

}  // namespace kinhybrid
