#include "kinhybrid/hybrid.hpp"

#include <chrono>
#include <ostream>
#include <sstream>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/rng.hpp"

namespace kinhybrid {

HybridSolver::HybridSolver(const ProblemSpec& problem, const HybridOptions& options)
    : problem_(problem),
      options_(options),
      mesh_(problem.mesh()),
      materials_(problem.material_field()),
      quad_(options.quadrature),
      source_rate_(problem.source_rate()) {
  if (!(options.mc.w_kill > 0.0)) throw ConfigError("w_kill must be positive");
  for (double s : source_rate_) has_source_ = has_source_ || s > 0.0;
}

HybridState HybridSolver::initial_state() const {
  HybridState state;
  state.phi.assign(mesh_.cell_count(), 0.0);
  if (problem_.initial.kind != InitialKind::None) {
    state.bank = sample_initial_condition(problem_, options_.mc.particles,
                                          stream_key(options_.mc.seed, Stream::InitialCondition, 0), problem_.dt());
    // Initial particles enter step 1 as carried particles.
    state.bank.born = 0;
  }
  return state;
}

const ImplicitStepper& HybridSolver::stepper(double dt) {
  auto& slot = steppers_[dt];
  if (!slot) slot = std::make_unique<ImplicitStepper>(mesh_, materials_, quad_, dt);
  return *slot;
}

StepReport HybridSolver::step(HybridState& state, double dt) {
  if (!(dt > 0.0)) throw ConfigError("hybrid step: dt must be positive");
  const auto& mc = options_.mc;
  const auto k = static_cast<std::uint64_t>(state.step);
  const std::size_t cells = mesh_.cell_count();
  StepReport rep;
  rep.step = state.step;
  rep.dt = dt;

  // Uncollided: carried bank plus new external particles through sigma_t.
  ParticleBank& bank = state.bank;
  for (auto& p : bank.particles) p.residual = dt;
  rep.n_prev = bank.size();
  bank.born = 0;
  bank.moved = 0;
  bank.carried = rep.n_prev;
  if (has_source_) {
    bank.absorb(sample_volume_source(mesh_, source_rate_, dt, mc.particles,
                                     stream_key(mc.seed, Stream::ExternalVolume, k), mc.convention));
  }
  if (problem_.boundary.kind == BoundaryKind::LeftInflux) {
    bank.absorb(sample_boundary_source_left(mesh_, problem_.boundary.value, dt, mc.particles,
                                            stream_key(mc.seed, Stream::ExternalBoundary, k)));
  }
  rep.n_born = bank.born;
  rep.n_u = rep.n_born + rep.n_prev;

  CellTally tally_u(cells);
  rep.moved = advance_and_tally(bank, mesh_, materials_.sigma_t, dt, tally_u, mc.workers);
  russian_roulette(bank, mc.w_kill, stream_key(mc.seed, Stream::UncollidedRoulette, k));
  std::vector<double> phi = tally_u.flux(mesh_, dt);

  if (options_.collided && !materials_.scattering_free()) {
    // Collided: zero start, zero inflow, first-collision source.
    std::vector<double> iso(cells);
    for (std::size_t c = 0; c < cells; ++c) iso[c] = materials_.sigma_s[c] * phi[c] / kFourPi;
    const DgField zero(quad_.size(), cells);
    const SolveResult collided = stepper(dt).step(zero, iso, nullptr, options_.sn);
    rep.iterations = collided.iterations;
    rep.sn_updates = collided.cell_updates;
    const std::vector<double> phi_c = scalar_flux_dg(collided.field, quad_).phi;

    // Relabel the scattered population as new particles.
    std::vector<double> rate(cells);
    const double area = mesh_.cell_area();
    for (std::size_t c = 0; c < cells; ++c) {
      const double r = materials_.sigma_s[c] * (phi[c] + phi_c[c]);
      if (r < 0.0) rep.clipped_mass += -r * area * dt;
      rate[c] = std::max(r, 0.0);
    }
    ParticleBank relabel =
        sample_volume_source(mesh_, rate, dt, mc.particles, stream_key(mc.seed, Stream::Relabel, k), mc.convention);
    rep.n_r = relabel.born;
    rep.relabel_weight = relabel.total_weight();
    CellTally tally_r(cells);
    rep.moved += advance_and_tally(relabel, mesh_, materials_.sigma_t, dt, tally_r, mc.workers);
    russian_roulette(relabel, mc.w_kill, stream_key(mc.seed, Stream::RelabelRoulette, k));
    const std::vector<double> phi_r = tally_r.flux(mesh_, dt);
    for (std::size_t c = 0; c < cells; ++c) phi[c] += phi_r[c];
    bank.particles.insert(bank.particles.end(), relabel.particles.begin(), relabel.particles.end());
  }

  rep.live = bank.size();
  rep.bank_weight = bank.total_weight();
  state.phi = std::move(phi);
  state.step += 1;
  state.time += dt;
  rep.time = state.time;
  state.n_mc_total += rep.n_u + rep.n_r;
  state.c_sn_collided += complexity_sn(quad_.size(), static_cast<std::uint64_t>(mesh_.n()),
                                       static_cast<std::uint64_t>(rep.iterations));
  state.sum_iterations += static_cast<std::uint64_t>(rep.iterations);
  state.moved_live += rep.moved;
  state.sn_updates_live += rep.sn_updates;
  state.clipped_mass += rep.clipped_mass;
  state.history.push_back(rep);

  if (options_.log) {
    *options_.log << "step " << rep.step + 1 << " t=" << rep.time << " N_i=" << rep.iterations
                  << " live=" << rep.live << " weight=" << rep.bank_weight << " clipped=" << rep.clipped_mass << '\n';
  }
  return rep;
}

StepReport hybrid_step(HybridSolver& solver, HybridState& state, double dt) { return solver.step(state, dt); }

namespace {

void fill_common(RunReport& r, const ProblemSpec& problem, const HybridOptions& options, const std::string& solver) {
  r.problem = problem.name;
  r.solver = solver;
  r.n_x = problem.n_x;
  r.quadrature = options.quadrature;
  r.tolerance = options.sn.tolerance;
  r.workers = std::max(options.sn.workers, options.mc.workers);
  r.steps = problem.steps();
  r.dt = problem.dt();
  r.t_final = problem.t_final;
  if (solver != "sn") {
    r.particles = options.mc.particles;
    r.seed = options.mc.seed;
    r.w_kill = options.mc.w_kill;
  }
  std::ostringstream text;
  write_problem(text, problem);
  text << "solver=" << solver << " n=" << options.quadrature << " np=" << r.particles << " seed=" << r.seed
       << " delta=" << r.tolerance << " w_kill=" << r.w_kill << " convention="
       << (options.mc.convention == WeightConvention::Global ? "global" : "per_cell");
  r.digest = fnv1a_hex(text.str());
}

RunResult run_particles(const ProblemSpec& problem, const HybridOptions& options, const std::string& label) {
  const auto t0 = std::chrono::steady_clock::now();
  HybridSolver solver(problem, options);
  HybridState state = solver.initial_state();
  const int steps = problem.steps();
  for (int k = 0; k < steps; ++k) solver.step(state, problem.step_length(k));

  RunResult out;
  RunReport& r = out.report;
  fill_common(r, problem, options, label);
  r.n_mc_total = state.n_mc_total;
  r.c_sn = state.c_sn_collided;
  r.complexity = complexity_hybrid(state.n_mc_total, state.c_sn_collided);
  r.sum_iterations = state.sum_iterations;
  r.moved_live = state.moved_live;
  r.sn_updates_live = state.sn_updates_live;
  for (const auto& s : state.history) {
    r.iterations.push_back(s.iterations);
    r.n_prev.push_back(s.n_prev);
    r.n_u.push_back(s.n_u);
    r.n_r.push_back(s.n_r);
  }
  r.clipped_mass = state.clipped_mass;
  r.final_bank_size = state.bank.size();
  r.final_bank_weight = state.bank.total_weight();
  r.flux_semantics = "cell-averaged scalar flux averaged over the last time step (track-length tally / (|C| dt))";
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.phi = std::move(state.phi);
  out.bank = std::move(state.bank);
  return out;
}

}  // namespace

RunResult run_hybrid(const ProblemSpec& problem, const HybridOptions& options) {
  HybridOptions o = options;
  o.collided = true;
  return run_particles(problem, o, "hybrid");
}

RunResult run_mc(const ProblemSpec& problem, const HybridOptions& options) {
  HybridOptions o = options;
  o.collided = false;
  return run_particles(problem, o, "mc");
}

SnRun run_sn_steps(const Mesh& mesh, const MaterialField& materials, const QuadratureSet& quad,
                   std::span<const double> isotropic_source, const TimedInflowFn* inflow, DgField initial,
                   std::span<const double> step_lengths, const SolveOptions& options, std::ostream* log) {
  SnRun run;
  run.field = std::move(initial);
  std::map<double, std::unique_ptr<ImplicitStepper>> steppers;
  double t = 0.0;
  for (std::size_t k = 0; k < step_lengths.size(); ++k) {
    const double dt = step_lengths[k];
    auto& slot = steppers[dt];
    if (!slot) slot = std::make_unique<ImplicitStepper>(mesh, materials, quad, dt);
    t += dt;
    InflowFn at_end;
    if (inflow) at_end = [inflow, t](std::size_t q, Side side, Point2 p) { return (*inflow)(t, q, side, p); };
    SolveResult r = slot->step(run.field, isotropic_source, inflow ? &at_end : nullptr, options);
    run.field = std::move(r.field);
    run.iterations.push_back(r.iterations);
    run.sn_updates += r.cell_updates;
    if (log) *log << "step " << k + 1 << " t=" << t << " N_i=" << r.iterations << '\n';
  }
  return run;
}

RunResult run_monolithic_sn(const ProblemSpec& problem, const HybridOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const Mesh mesh = problem.mesh();
  const MaterialField materials = problem.material_field();
  const QuadratureSet quad(options.quadrature);
  std::vector<double> iso = problem.source_rate();
  for (double& s : iso) s /= kFourPi;

  TimedInflowFn inflow;
  if (problem.boundary.kind == BoundaryKind::LeftInflux) {
    const double value = problem.boundary.value;
    inflow = [value](double, std::size_t, Side side, Point2) { return side == Side::Left ? value : 0.0; };
  }
  std::vector<double> lengths;
  for (int k = 0; k < problem.steps(); ++k) lengths.push_back(problem.step_length(k));

  SnRun run = run_sn_steps(mesh, materials, quad, iso, inflow ? &inflow : nullptr,
                           project_initial_condition(problem, mesh, quad.size()), lengths, options.sn, options.log);

  RunResult out;
  RunReport& r = out.report;
  fill_common(r, problem, options, "sn");
  for (int n : run.iterations) r.sum_iterations += static_cast<std::uint64_t>(n);
  r.iterations = run.iterations;
  r.c_sn = complexity_sn(quad.size(), static_cast<std::uint64_t>(mesh.n()), r.sum_iterations);
  r.complexity = r.c_sn;
  r.sn_updates_live = run.sn_updates;
  r.flux_semantics = "cell average of the DG scalar flux at the final time";
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.phi = scalar_flux_dg(run.field, quad).phi;
  return out;
}

}  // namespace kinhybrid
