#include "kinhybrid/metrics.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "kinhybrid/errors.hpp"

namespace kinhybrid {

double relative_l2(std::span<const double> phi, std::span<const double> ref, double h) {
  if (phi.size() != ref.size()) throw ContractViolation("relative_l2: grids differ in size");
  const double area = h * h;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < phi.size(); ++c) {
    const double d = phi[c] - ref[c];
    num += area * d * d;
    den += area * ref[c] * ref[c];
  }
  if (!(den > 0.0)) throw UndefinedReferenceError("relative_l2: reference field is identically zero");
  return std::sqrt(num) / std::sqrt(den);
}

std::vector<double> project_to_coarse(std::span<const double> fine, const Mesh& fine_mesh, const Mesh& coarse_mesh) {
  if (fine.size() != fine_mesh.cell_count()) throw ContractViolation("project_to_coarse: field does not match mesh");
  const int nf = fine_mesh.n();
  const int nc = coarse_mesh.n();
  const double tol = 1e-9 * coarse_mesh.h();
  if (nf % nc != 0 || std::abs(fine_mesh.x_min() - coarse_mesh.x_min()) > tol ||
      std::abs(fine_mesh.y_min() - coarse_mesh.y_min()) > tol ||
      std::abs(fine_mesh.x_max() - coarse_mesh.x_max()) > tol ||
      std::abs(fine_mesh.y_max() - coarse_mesh.y_max()) > tol) {
    throw ConfigError("project_to_coarse: grids of " + std::to_string(nf) + " and " + std::to_string(nc) +
                      " cells are not nested");
  }
  const int r = nf / nc;
  const double inv = 1.0 / (static_cast<double>(r) * r);
  std::vector<double> out(coarse_mesh.cell_count(), 0.0);
  for (int J = 0; J < nc; ++J) {
    for (int I = 0; I < nc; ++I) {
      double sum = 0.0;
      for (int b = 0; b < r; ++b)
        for (int a = 0; a < r; ++a) sum += fine[fine_mesh.index(I * r + a, J * r + b)];
      out[coarse_mesh.index(I, J)] = sum * inv;
    }
  }
  return out;
}

std::uint64_t complexity_sn(std::uint64_t n_omega, std::uint64_t n_x, std::uint64_t sum_iterations) {
  return 4 * n_omega * n_x * n_x * sum_iterations;
}

std::uint64_t complexity_hybrid(std::uint64_t n_mc_total, std::uint64_t c_sn_collided) {
  return n_mc_total + c_sn_collided;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["problem"] = r.problem;
  j["solver"] = r.solver;
  j["config"] = {{"n_x", r.n_x},         {"quadrature", r.quadrature}, {"particles", r.particles},
                 {"seed", r.seed},       {"tolerance", r.tolerance},   {"w_kill", r.w_kill},
                 {"workers", r.workers}, {"steps", r.steps},           {"dt", r.dt},
                 {"t_final", r.t_final}, {"digest", r.digest}};
  j["delta"] = r.delta ? nlohmann::ordered_json(*r.delta) : nlohmann::ordered_json(nullptr);
  j["reference"] = r.reference;
  j["complexity"] = r.complexity;
  j["breakdown"] = {{"n_mc_total", r.n_mc_total},
                    {"c_sn", r.c_sn},
                    {"sum_iterations", r.sum_iterations},
                    {"moved_live", r.moved_live},
                    {"sn_updates_live", r.sn_updates_live},
                    {"iterations", r.iterations},
                    {"n_prev", r.n_prev},
                    {"n_u", r.n_u},
                    {"n_r", r.n_r},
                    {"clipped_mass", r.clipped_mass},
                    {"final_bank_size", r.final_bank_size},
                    {"final_bank_weight", r.final_bank_weight}};
  j["wall_seconds"] = r.wall_seconds;
  j["flux_semantics"] = r.flux_semantics;
  return j.dump(2);
}

void write_report(const std::string& path, const RunReport& report) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report '" + path + "'");
  out << report_to_json(report) << '\n';
  if (!out) throw ConfigError("failed writing report '" + path + "'");
}

}  // namespace kinhybrid
