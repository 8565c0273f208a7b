#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "kinhybrid/mc_transport.hpp"
#include "kinhybrid/metrics.hpp"
#include "kinhybrid/problems.hpp"
#include "kinhybrid/quadrature.hpp"
#include "kinhybrid/sn_dg.hpp"

namespace kinhybrid {

struct StepReport {
  int step = 0;        // zero-based
  double time = 0.0;   // end of the step
  double dt = 0.0;
  std::uint64_t n_prev = 0;   // bank size at step start
  std::uint64_t n_born = 0;   // new external/boundary particles
  std::uint64_t n_u = 0;      // n_born + n_prev
  std::uint64_t n_r = 0;      // relabelled particles
  std::uint64_t moved = 0;    // live tracker count, both MC stages
  int iterations = 0;         // collided source iterations
  std::uint64_t sn_updates = 0;
  double clipped_mass = 0.0;    // negative relabel source removed by clipping
  double relabel_weight = 0.0;  // total weight born in the relabel stage
  std::uint64_t live = 0;
  double bank_weight = 0.0;
};

struct HybridState {
  ParticleBank bank;
  std::vector<double> phi;  // time-averaged scalar flux of the last step
  int step = 0;
  double time = 0.0;
  std::uint64_t n_mc_total = 0;
  std::uint64_t c_sn_collided = 0;
  std::uint64_t sum_iterations = 0;
  std::uint64_t moved_live = 0;
  std::uint64_t sn_updates_live = 0;
  double clipped_mass = 0.0;
  std::vector<StepReport> history;
};

struct HybridOptions {
  MCParams mc;
  SolveOptions sn;
  int quadrature = 4;
  bool collided = true;  // false: uncollided Monte Carlo only
  std::ostream* log = nullptr;
};

/// One problem prepared for repeated hybrid steps. Steppers for the (at most
/// two) distinct step lengths are built lazily and reused.
class HybridSolver {
 public:
  HybridSolver(const ProblemSpec& problem, const HybridOptions& options);

  const Mesh& mesh() const { return mesh_; }
  const QuadratureSet& quadrature() const { return quad_; }

  /// Bank holding the initial-condition particles (empty without an IC).
  HybridState initial_state() const;

  /// Advances by dt: uncollided MC, collided S_N, relabel MC, combine.
  StepReport step(HybridState& state, double dt);

 private:
  const ImplicitStepper& stepper(double dt);

  ProblemSpec problem_;
  HybridOptions options_;
  Mesh mesh_;
  MaterialField materials_;
  QuadratureSet quad_;
  std::vector<double> source_rate_;
  bool has_source_ = false;
  std::map<double, std::unique_ptr<ImplicitStepper>> steppers_;
};

StepReport hybrid_step(HybridSolver& solver, HybridState& state, double dt);

struct RunResult {
  std::vector<double> phi;
  RunReport report;
  ParticleBank bank;  // final bank (Monte Carlo solvers)
};

RunResult run_hybrid(const ProblemSpec& problem, const HybridOptions& options);
/// Uncollided Monte Carlo alone: exact for scattering-free problems.
RunResult run_mc(const ProblemSpec& problem, const HybridOptions& options);
/// Monolithic S_N with the full scattering source. Phi is the end-of-step
/// cell average.
RunResult run_monolithic_sn(const ProblemSpec& problem, const HybridOptions& options);

/// Boundary data that may depend on the end time of the step.
using TimedInflowFn = std::function<double(double t, std::size_t q, Side side, Point2 where)>;

struct SnRun {
  DgField field;
  std::vector<int> iterations;
  std::uint64_t sn_updates = 0;
};

/// Backward-Euler steps of the given lengths from `initial`.
SnRun run_sn_steps(const Mesh& mesh, const MaterialField& materials, const QuadratureSet& quad,
                   std::span<const double> isotropic_source, const TimedInflowFn* inflow, DgField initial,
                   std::span<const double> step_lengths, const SolveOptions& options, std::ostream* log = nullptr);

}  // namespace kinhybrid
