#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kinhybrid/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hybrid Monte Carlo / discrete-ordinates transport simulator"};
  app.require_subcommand(1);

  kinhybrid::RunConfig cfg;
  std::string solver = "hybrid";
  std::string convention = "global";
  int n = 0;
  std::uint64_t np = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double wkill = 0.0;
  int nx = 0;

  auto* run = app.add_subcommand("run", "Run one solver on a problem file");
  run->add_option("--problem", cfg.problem_path, "Problem file")->required()->check(CLI::ExistingFile);
  run->add_option("--solver", solver, "mc, sn or hybrid")->check(CLI::IsMember({"mc", "sn", "hybrid"}));
  auto* opt_n = run->add_option("--n", n, "Quadrature level N (N^2 ordinates)");
  auto* opt_np = run->add_option("--np", np, "New particles per step");
  auto* opt_seed = run->add_option("--seed", seed, "Random seed");
  auto* opt_delta = run->add_option("--delta", delta, "Source-iteration tolerance");
  auto* opt_wkill = run->add_option("--wkill", wkill, "Killing weight");
  auto* opt_nx = run->add_option("--nx", nx, "Override cells per dimension");
  run->add_option("--ref", cfg.reference, "Reference grid CSV")->check(CLI::ExistingFile);
  run->add_option("--out", cfg.out_dir, "Output directory");
  run->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--weights", convention, "Volume-source weights: global or per_cell")
      ->check(CLI::IsMember({"global", "per_cell"}));

  std::string study_file;
  std::string study_out = "study_out";
  auto* study = app.add_subcommand("study", "Run a convergence study");
  study->add_option("--file", study_file, "Study file")->required()->check(CLI::ExistingFile);
  study->add_option("--out", study_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    cfg.solver = kinhybrid::parse_solver(solver);
    if (*opt_n) cfg.quadrature = n;
    if (*opt_np) cfg.particles = np;
    if (*opt_seed) cfg.seed = seed;
    if (*opt_delta) cfg.tolerance = delta;
    if (*opt_wkill) cfg.w_kill = wkill;
    if (*opt_nx) cfg.n_x = nx;
    cfg.convention = convention == "per_cell" ? kinhybrid::WeightConvention::PerCell
                                               : kinhybrid::WeightConvention::Global;
    return kinhybrid::cmd_run(cfg, std::cout, std::cerr);
  }
  return kinhybrid::cmd_study(study_file, study_out, std::cout, std::cerr);
}
