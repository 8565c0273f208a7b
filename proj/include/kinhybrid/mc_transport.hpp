#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kinhybrid/geometry.hpp"
#include "kinhybrid/mesh.hpp"

namespace kinhybrid {

struct Particle {
  Point2 pos;
  Direction3 dir;
  double weight = 0.0;
  double residual = 0.0;  // flight time left in the current step

  friend bool operator==(const Particle&, const Particle&) = default;
};

struct ParticleBank {
  std::vector<Particle> particles;
  std::uint64_t born = 0;     // created this step
  std::uint64_t carried = 0;  // alive at step start
  std::uint64_t moved = 0;    // advanced this step

  std::size_t size() const { return particles.size(); }
  bool empty() const { return particles.empty(); }
  double total_weight() const;

  /// Appends the particles of `other` and adds its birth count.
  void absorb(ParticleBank&& other);
};

/// Raw track-length sums per cell: sum of w * (1 - e^{-lambda l}) / lambda.
class CellTally {
 public:
  explicit CellTally(std::size_t cells = 0) : raw_(cells, 0.0) {}

  std::size_t size() const { return raw_.size(); }
  std::span<double> raw() { return raw_; }
  std::span<const double> raw() const { return raw_; }
  double total() const;
  void clear();
  void merge(const CellTally& other);

  /// Time- and cell-averaged scalar flux: raw / (|C| dt).
  std::vector<double> flux(const Mesh& mesh, double dt) const;

 private:
  std::vector<double> raw_;
};

/// Per-particle weight of a volume source. Global: w = W / sum_C N^C, every
/// particle equal. PerCell: w^C = W^C / N^C.
enum class WeightConvention { Global, PerCell };

struct MCParams {
  std::uint64_t particles = 0;  // N_p, new particles per step and source
  double w_kill = 1e-15;
  std::uint64_t seed = 0;
  WeightConvention convention = WeightConvention::Global;
  int workers = 1;
};

/// Isotropic direction folded onto the upper hemisphere.
Direction3 sample_isotropic_upper(double u_mu, double u_phi);

/// `rate` holds the angle-integrated emission density per cell (per unit area
/// and time). W^C = rate * |C| * dt; N^C = floor(W^C N_p / W).
ParticleBank sample_volume_source(const Mesh& mesh, std::span<const double> rate, double dt, std::uint64_t n_p,
                                  std::uint64_t rng_key, WeightConvention convention = WeightConvention::Global);

/// Isotropic inflow of angular flux `value` through the x = x_min face. Total
/// weight per step is value * face_length * pi * dt.
ParticleBank sample_boundary_source_left(const Mesh& mesh, double value, double dt, std::uint64_t n_p,
                                         std::uint64_t rng_key);

/// Flies every particle for its residual time through the attenuation field,
/// scoring into `tally`. Exiting particles are dropped and survivors get
/// residual = dt. Returns the number of particles moved.
std::uint64_t advance_and_tally(ParticleBank& bank, const Mesh& mesh, std::span<const double> lambda, double dt,
                                CellTally& tally, int workers = 1);

/// Particles below w_kill survive with probability w / w_kill at weight w_kill.
void russian_roulette(ParticleBank& bank, double w_kill, std::uint64_t rng_key);

/// Columnar text: x y Ox Oy Oz w tau, one particle per line.
void write_bank(std::ostream& out, const ParticleBank& bank);
ParticleBank read_bank(std::istream& in);

}  // namespace kinhybrid
