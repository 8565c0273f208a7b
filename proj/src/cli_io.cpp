#include "kinhybrid/cli_io.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/grid_io.hpp"
#include "kinhybrid/keyvalue.hpp"
#include "kinhybrid/metrics.hpp"

namespace fs = std::filesystem;

namespace kinhybrid {

SolverKind parse_solver(const std::string& name) {
  if (name == "mc") return SolverKind::MC;
  if (name == "sn") return SolverKind::SN;
  if (name == "hybrid") return SolverKind::Hybrid;
  throw ConfigError("unknown solver '" + name + "' (expected mc, sn or hybrid)");
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::MC: return "mc";
    case SolverKind::SN: return "sn";
    case SolverKind::Hybrid: return "hybrid";
  }
  return "?";
}

void RunConfig::validate() const {
  if (quadrature && *quadrature < 1) throw ConfigError("--n must be >= 1");
  if (tolerance && !(*tolerance > 0.0)) throw ConfigError("--delta must be positive");
  if (w_kill && !(*w_kill > 0.0)) throw ConfigError("--wkill must be positive");
  if (n_x && *n_x < 1) throw ConfigError("--nx must be >= 1");
  if (workers < 1) throw ConfigError("--workers must be >= 1");
}

HybridOptions resolve_options(const RunConfig& config, const ProblemSpec& problem) {
  HybridOptions o;
  o.quadrature = config.quadrature.value_or(problem.run.quadrature);
  o.mc.particles = config.particles.value_or(problem.run.particles);
  o.mc.w_kill = config.w_kill.value_or(problem.run.w_kill);
  o.mc.seed = config.seed.value_or(problem.run.seed);
  o.mc.workers = config.workers;
  o.mc.convention = config.convention;
  o.sn.tolerance = config.tolerance.value_or(problem.run.tolerance);
  o.sn.workers = config.workers;
  return o;
}

RunResult execute(SolverKind solver, const ProblemSpec& problem, const HybridOptions& options) {
  switch (solver) {
    case SolverKind::MC: return run_mc(problem, options);
    case SolverKind::SN: return run_monolithic_sn(problem, options);
    case SolverKind::Hybrid: return run_hybrid(problem, options);
  }
  throw ContractViolation("execute: bad solver");
}

double delta_against(const std::vector<double>& phi, const Mesh& mesh, const std::string& reference_path) {
  const ScalarGrid ref = read_grid_csv_file(reference_path);
  const Mesh ref_mesh = ref.mesh();
  const std::vector<double> projected =
      ref.n_x == mesh.n() ? ref.values : project_to_coarse(ref.values, ref_mesh, mesh);
  return relative_l2(phi, projected, mesh.h());
}

int cmd_run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    config.validate();
    ProblemSpec problem = read_problem_file(config.problem_path);
    if (config.n_x) problem = problem.at_resolution(*config.n_x);
    problem.validate();
    HybridOptions options = resolve_options(config, problem);
    options.log = &log;
    RunResult result = execute(config.solver, problem, options);
    const Mesh mesh = problem.mesh();
    if (!config.reference.empty()) {
      result.report.reference = config.reference;
      result.report.delta = delta_against(result.phi, mesh, config.reference);
    }
    fs::create_directories(config.out_dir);
    const fs::path dir(config.out_dir);
    write_grid_csv_file((dir / "phi.csv").string(), make_grid(mesh, result.phi));
    write_report((dir / "report.json").string(), result.report);
    log << "wrote " << (dir / "phi.csv").string() << " and " << (dir / "report.json").string() << '\n';
    if (result.report.delta) log << "delta " << *result.report.delta << '\n';
    log << "complexity " << result.report.complexity << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

namespace {

StudyEntry read_entry(const KvSection& s, const std::string& fallback_label) {
  StudyEntry e;
  e.label = s.get_string("label", fallback_label);
  e.solver = parse_solver(s.get_string("solver", "hybrid"));
  e.quadrature = static_cast<int>(s.get_int("n", 4));
  e.n_x = static_cast<int>(s.get_int("n_x"));
  e.particles = s.get_uint("np", 0);
  e.seed = s.get_uint("seed", 1);
  if (e.quadrature < 1 || e.n_x < 1) throw ConfigError("study entry '" + e.label + "': n and n_x must be >= 1");
  return e;
}

}  // namespace

StudySpec read_study_file(const std::string& path) {
  const KvDocument doc = parse_keyvalue_file(path);
  const KvSection* study = doc.first("study");
  if (!study) throw ConfigError("study file: missing [study] section");
  StudySpec spec;
  fs::path problem = study->get_string("problem");
  if (problem.is_relative()) problem = fs::path(path).parent_path() / problem;
  spec.problem_path = problem.string();
  spec.workers = static_cast<int>(study->get_int("workers", 1));
  const KvSection* ref = doc.first("reference");
  if (!ref) throw ConfigError("study file: missing [reference] section");
  spec.reference = read_entry(*ref, "reference");
  int k = 0;
  for (const KvSection* s : doc.all("run")) spec.runs.push_back(read_entry(*s, "run" + std::to_string(++k)));
  return spec;
}

namespace {

RunResult run_entry(const StudyEntry& e, const ProblemSpec& base, int workers, const fs::path& dir, std::ostream& log) {
  const ProblemSpec problem = base.at_resolution(e.n_x);
  problem.validate();
  RunConfig cfg;
  cfg.quadrature = e.quadrature;
  cfg.particles = e.particles;
  cfg.seed = e.seed;
  cfg.workers = workers;
  HybridOptions options = resolve_options(cfg, problem);
  log << "== " << e.label << " (" << solver_name(e.solver) << ", N=" << e.quadrature << ", N_x=" << e.n_x
      << ", N_p=" << e.particles << ")\n";
  RunResult r = execute(e.solver, problem, options);
  fs::create_directories(dir);
  write_grid_csv_file((dir / "phi.csv").string(), make_grid(problem.mesh(), r.phi));
  return r;
}

}  // namespace

int cmd_study(const std::string& study_path, const std::string& out_dir, std::ostream& log, std::ostream& err) {
  StudySpec spec;
  ProblemSpec base;
  try {
    spec = read_study_file(study_path);
    base = read_problem_file(spec.problem_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const fs::path out(out_dir);
  std::string ref_path;
  try {
    RunResult ref = run_entry(spec.reference, base, spec.workers, out / spec.reference.label, log);
    write_report((out / spec.reference.label / "report.json").string(), ref.report);
    ref_path = (out / spec.reference.label / "phi.csv").string();
  } catch (const std::exception& e) {
    err << "error: reference run failed: " << e.what() << '\n';
    return 1;
  }

  std::ofstream csv(out / "study.csv");
  if (!csv) {
    err << "error: cannot write " << (out / "study.csv").string() << '\n';
    return 1;
  }
  csv << "label,solver,n,n_x,np,seed,delta,complexity,n_mc_total,c_sn,sum_iterations,status\n";
  bool failed = false;
  for (const auto& e : spec.runs) {
    csv << e.label << ',' << solver_name(e.solver) << ',' << e.quadrature << ',' << e.n_x << ',' << e.particles << ','
        << e.seed << ',';
    try {
      RunResult r = run_entry(e, base, spec.workers, out / e.label, log);
      const Mesh mesh = base.at_resolution(e.n_x).mesh();
      r.report.reference = ref_path;
      r.report.delta = delta_against(r.phi, mesh, ref_path);
      write_report((out / e.label / "report.json").string(), r.report);
      csv << format_double(*r.report.delta) << ',' << r.report.complexity << ',' << r.report.n_mc_total << ','
          << r.report.c_sn << ',' << r.report.sum_iterations << ",ok\n";
    } catch (const std::exception& ex) {
      failed = true;
      std::string msg = ex.what();
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      csv << ",,,,,failed: " << msg << '\n';
      err << "error: run '" << e.label << "' failed: " << ex.what() << '\n';
    }
    csv.flush();
  }
  log << "wrote " << (out / "study.csv").string() << '\n';
  return failed ? 1 : 0;
}

}  // namespace kinhybrid
