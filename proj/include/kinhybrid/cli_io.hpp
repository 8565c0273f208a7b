#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kinhybrid/hybrid.hpp"
#include "kinhybrid/problems.hpp"

namespace kinhybrid {

enum class SolverKind { MC, SN, Hybrid };

SolverKind parse_solver(const std::string& name);
std::string solver_name(SolverKind kind);

/// Settings of one run; unset optionals fall back to the problem file.
struct RunConfig {
  std::string problem_path;
  SolverKind solver = SolverKind::Hybrid;
  std::optional<int> quadrature;
  std::optional<std::uint64_t> particles;
  std::optional<double> tolerance;
  std::optional<double> w_kill;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_x;
  int workers = 1;
  WeightConvention convention = WeightConvention::Global;
  std::string out_dir = ".";
  std::string reference;  // grid CSV, optional

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Options the solvers see after merging the problem defaults.
HybridOptions resolve_options(const RunConfig& config, const ProblemSpec& problem);

RunResult execute(SolverKind solver, const ProblemSpec& problem, const HybridOptions& options);

/// Delta against a reference grid, projected down when it is finer.
double delta_against(const std::vector<double>& phi, const Mesh& mesh, const std::string& reference_path);

/// Runs one configuration and writes phi.csv and report.json to out_dir.
/// Returns the process exit status; diagnostics go to `err`.
int cmd_run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// One row of a convergence study.
struct StudyEntry {
  std::string label;
  SolverKind solver = SolverKind::Hybrid;
  int quadrature = 4;
  int n_x = 0;
  std::uint64_t particles = 0;
  std::uint64_t seed = 1;
};

struct StudySpec {
  std::string problem_path;  // resolved against the study file's directory
  int workers = 1;
  StudyEntry reference;
  std::vector<StudyEntry> runs;
};

StudySpec read_study_file(const std::string& path);

/// Runs the reference, then every entry, and writes study.csv with one
/// (label, Delta, C) row per entry. Failed entries are marked and skipped.
int cmd_study(const std::string& study_path, const std::string& out_dir, std::ostream& log, std::ostream& err);

}  // namespace kinhybrid
