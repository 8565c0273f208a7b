#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kinhybrid/geometry.hpp"
#include "kinhybrid/mc_transport.hpp"
#include "kinhybrid/mesh.hpp"
#include "kinhybrid/sn_dg.hpp"

namespace kinhybrid {

/// Isotropic volume source with angle-integrated emission `rate` per unit
/// area and time, painted by cell-centre containment like materials.
struct SourceRegion {
  Rect box;
  double rate = 0.0;

  friend bool operator==(const SourceRegion&, const SourceRegion&) = default;
};

enum class InitialKind { None, Gaussian };

/// Gaussian: Psi_0 = 1/(4 pi) * exp(-|x - c|^2 / (2 var)) / (2 pi var).
struct InitialCondition {
  InitialKind kind = InitialKind::None;
  double variance = 0.0;
  Point2 center;

  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

enum class BoundaryKind { Vacuum, LeftInflux };

/// LeftInflux: Psi = value for Omega_x > 0 on x = x_min, vacuum elsewhere.
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Vacuum;
  double value = 0.0;

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

/// Solver settings a problem file can carry; the command line overrides them.
struct RunDefaults {
  int quadrature = 4;
  std::uint64_t particles = 10000;
  double tolerance = 1e-4;
  double w_kill = 1e-15;
  std::uint64_t seed = 1;

  friend bool operator==(const RunDefaults&, const RunDefaults&) = default;
};

struct ProblemSpec {
  std::string name;
  double x_min = 0.0;
  double y_min = 0.0;
  double length = 1.0;
  int n_x = 1;
  std::vector<MaterialRegion> materials;
  std::vector<SourceRegion> sources;
  InitialCondition initial;
  BoundaryCondition boundary;
  double t_final = 1.0;
  double cfl = 0.5;
  RunDefaults run;

  Mesh mesh() const;
  double h() const { return length / n_x; }
  double dt() const { return cfl * h(); }
  /// ceil(t_final / dt), ignoring a remainder below roundoff.
  int steps() const;
  /// Length of step `k` (zero-based); the last one lands on t_final.
  double step_length(int k) const;

  MaterialField material_field() const;
  /// Angle-integrated source density per cell.
  std::vector<double> source_rate() const;

  /// Same problem at another resolution.
  ProblemSpec at_resolution(int n) const;

  /// Throws ConfigError on inconsistent data.
  void validate() const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

ProblemSpec line_source_problem(int n_x, double cfl = 0.5);

ProblemSpec lattice_problem(int n_x, double cfl = 25.6, double absorber_sigma_t = 10.0, double source_rate = 1.0);

/// Hohlraum region data. Only the wall values are the usual ones; the rest
/// are plain defaults, override them in the problem file.
struct HohlraumParams {
  double wall_thickness = 0.05;
  double capsule_sigma_t = 100.0;
  double capsule_sigma_s = 90.0;
  double interior_sigma_t = 0.1;
  double interior_sigma_s = 0.1;
  double void_sigma_t = 0.0;
  double void_sigma_s = 0.0;
  double influx = 1.0;
};

ProblemSpec hohlraum_problem(int n_x, double cfl = 52.0, double wall_sigma_t = 100.0, double wall_sigma_s = 95.0,
                             const HohlraumParams& params = {});

/// Initial-condition particles: Gaussian positions (redrawn if outside the
/// domain), isotropic directions, equal weights summing to the IC mass
/// inside the domain. Residual time is `dt`.
ParticleBank sample_initial_condition(const ProblemSpec& spec, std::uint64_t n_p, std::uint64_t rng_key, double dt,
                                      std::uint64_t* redraws = nullptr);

/// Integral of the scalar initial condition over the domain.
double initial_mass(const ProblemSpec& spec);

/// Exact Q1 projection of the initial condition onto every ordinate.
DgField project_initial_condition(const ProblemSpec& spec, const Mesh& mesh, std::size_t ordinates);

void write_problem(std::ostream& out, const ProblemSpec& spec);
ProblemSpec read_problem(std::istream& in);
ProblemSpec read_problem_file(const std::string& path);
void write_problem_file(const std::string& path, const ProblemSpec& spec);

}  // namespace kinhybrid
