#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinhybrid/mesh.hpp"

namespace kinhybrid {

/// ||phi - ref|| / ||ref|| with the cell-area weighted discrete L2 norm.
/// Throws UndefinedReferenceError if ref is identically zero.
double relative_l2(std::span<const double> phi, std::span<const double> ref, double h = 1.0);

/// Area-weighted mean of the fine cells under each coarse cell. Throws
/// ConfigError unless the grids share extents and the fine one refines the
/// coarse one by an integer factor.
std::vector<double> project_to_coarse(std::span<const double> fine, const Mesh& fine_mesh, const Mesh& coarse_mesh);

/// 4 * n_omega * n_x^2 * sum_iterations.
std::uint64_t complexity_sn(std::uint64_t n_omega, std::uint64_t n_x, std::uint64_t sum_iterations);
/// n_mc_total + c_sn_collided.
std::uint64_t complexity_hybrid(std::uint64_t n_mc_total, std::uint64_t c_sn_collided);

/// 64-bit FNV-1a of a text, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

inline constexpr int kReportSchemaVersion = 1;

struct RunReport {
  std::string problem;
  std::string solver;
  int n_x = 0;
  int quadrature = 0;
  std::uint64_t particles = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double w_kill = 0.0;
  int workers = 1;
  int steps = 0;
  double dt = 0.0;
  double t_final = 0.0;

  std::optional<double> delta;
  std::string reference;

  std::uint64_t complexity = 0;
  std::uint64_t n_mc_total = 0;      // sum over steps of N_u + N_R
  std::uint64_t c_sn = 0;            // 4 N_Omega N_x^2 sum N_i
  std::uint64_t sum_iterations = 0;
  std::uint64_t moved_live = 0;      // particles moved, counted inside the tracker
  std::uint64_t sn_updates_live = 0; // DG unknowns updated, counted inside sweeps
  std::vector<int> iterations;       // N_i per step
  std::vector<std::uint64_t> n_prev; // carried bank size per step
  std::vector<std::uint64_t> n_u;
  std::vector<std::uint64_t> n_r;
  double clipped_mass = 0.0;
  double final_bank_weight = 0.0;
  std::uint64_t final_bank_size = 0;

  double wall_seconds = 0.0;
  std::string digest;  // of the problem file text plus solver settings
  std::string flux_semantics;
};

std::string report_to_json(const RunReport& report);
void write_report(const std::string& path, const RunReport& report);

}  // namespace kinhybrid
