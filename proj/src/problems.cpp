#include "kinhybrid/problems.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/keyvalue.hpp"
#include "kinhybrid/rng.hpp"

namespace kinhybrid {

Mesh ProblemSpec::mesh() const { return Mesh(x_min, y_min, h(), n_x); }

int ProblemSpec::steps() const {
  const double ratio = t_final / dt();
  return std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
}

double ProblemSpec::step_length(int k) const {
  const int n = steps();
  if (k < n - 1) return dt();
  return t_final - (n - 1) * dt();
}

MaterialField ProblemSpec::material_field() const { return paint_materials(mesh(), materials); }

std::vector<double> ProblemSpec::source_rate() const {
  const Mesh m = mesh();
  std::vector<double> rate(m.cell_count(), 0.0);
  for (std::size_t c = 0; c < rate.size(); ++c) {
    const Point2 p = m.center(m.cell(c));
    for (const auto& s : sources)
      if (s.box.contains(p)) rate[c] = s.rate;
  }
  return rate;
}

ProblemSpec ProblemSpec::at_resolution(int n) const {
  ProblemSpec out = *this;
  out.n_x = n;
  return out;
}

void ProblemSpec::validate() const {
  if (!(length > 0.0) || n_x < 1) throw ConfigError(name + ": domain length and n_x must be positive");
  if (!(t_final > 0.0) || !(cfl > 0.0)) throw ConfigError(name + ": t_final and cfl must be positive");
  for (const auto& s : sources)
    if (s.rate < 0.0) throw ConfigError(name + ": negative source rate");
  if (initial.kind == InitialKind::Gaussian && !(initial.variance > 0.0))
    throw ConfigError(name + ": Gaussian initial condition needs a positive variance");
  if (boundary.kind == BoundaryKind::LeftInflux && boundary.value < 0.0)
    throw ConfigError(name + ": negative boundary influx");
  if (run.quadrature < 1) throw ConfigError(name + ": quadrature level must be >= 1");
  if (!(run.tolerance > 0.0) || !(run.w_kill > 0.0)) throw ConfigError(name + ": tolerance and w_kill must be positive");
  material_field().validate();
}

ProblemSpec line_source_problem(int n_x, double cfl) {
  ProblemSpec p;
  p.name = "line_source";
  p.x_min = -1.5;
  p.y_min = -1.5;
  p.length = 3.0;
  p.n_x = n_x;
  p.materials = {{{-1.5, -1.5, 1.5, 1.5}, 1.0, 1.0}};
  p.initial = {InitialKind::Gaussian, 0.03, {0.0, 0.0}};
  p.t_final = 1.0;
  p.cfl = cfl;
  p.validate();
  return p;
}

ProblemSpec lattice_problem(int n_x, double cfl, double absorber_sigma_t, double source_rate) {
  if (n_x % 7 != 0) throw ConfigError("lattice: n_x must be divisible by 7, got " + std::to_string(n_x));
  ProblemSpec p;
  p.name = "lattice";
  p.length = 7.0;
  p.n_x = n_x;
  p.materials.push_back({{0.0, 0.0, 7.0, 7.0}, 1.0, 1.0});
  // 1-based unit squares; (a, b) covers [a-1, a] x [b-1, b].
  constexpr int absorbers[11][2] = {{2, 2}, {4, 2}, {6, 2}, {3, 3}, {5, 3}, {2, 4},
                                    {6, 4}, {3, 5}, {5, 5}, {2, 6}, {6, 6}};
  for (const auto& a : absorbers) {
    const double x0 = a[0] - 1.0;
    const double y0 = a[1] - 1.0;
    p.materials.push_back({{x0, y0, x0 + 1.0, y0 + 1.0}, absorber_sigma_t, 0.0});
  }
  p.sources.push_back({{3.0, 3.0, 4.0, 4.0}, source_rate});
  p.t_final = 3.2;
  p.cfl = cfl;
  p.validate();
  return p;
}

ProblemSpec hohlraum_problem(int n_x, double cfl, double wall_sigma_t, double wall_sigma_s,
                             const HohlraumParams& params) {
  ProblemSpec p;
  p.name = "hohlraum";
  p.length = 1.3;
  p.n_x = n_x;
  const double t = params.wall_thickness;
  const double cells = t / p.h();
  if (!(t > 0.0) || std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells) || std::round(cells) < 1.0) {
    throw ConfigError("hohlraum: wall thickness " + format_double(t) + " is not a whole number of cells at n_x = " +
                      std::to_string(n_x));
  }
  const double L = 1.3;
  p.materials = {
      {{0.0, 0.0, L, L}, params.void_sigma_t, params.void_sigma_s},
      {{0.0, 0.0, L, t}, wall_sigma_t, wall_sigma_s},
      {{0.0, L - t, L, L}, wall_sigma_t, wall_sigma_s},
      {{L - t, 0.0, L, L}, wall_sigma_t, wall_sigma_s},
      {{0.45, 0.25, 0.85, 1.05}, params.capsule_sigma_t, params.capsule_sigma_s},
      {{0.5, 0.3, 0.8, 1.0}, params.interior_sigma_t, params.interior_sigma_s},
  };
  p.boundary = {BoundaryKind::LeftInflux, params.influx};
  p.t_final = 2.6;
  p.cfl = cfl;
  p.validate();
  return p;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Mass of a centred 1-D normal inside [a, b].
double normal_mass(double a, double b, double mean, double var) {
  const double s = std::sqrt(var);
  return normal_cdf((b - mean) / s) - normal_cdf((a - mean) / s);
}

}  // namespace

double initial_mass(const ProblemSpec& spec) {
  if (spec.initial.kind == InitialKind::None) return 0.0;
  const auto& ic = spec.initial;
  return normal_mass(spec.x_min, spec.x_min + spec.length, ic.center.x, ic.variance) *
         normal_mass(spec.y_min, spec.y_min + spec.length, ic.center.y, ic.variance);
}

ParticleBank sample_initial_condition(const ProblemSpec& spec, std::uint64_t n_p, std::uint64_t rng_key, double dt,
                                      std::uint64_t* redraws) {
  if (spec.initial.kind != InitialKind::Gaussian) {
    throw ContractViolation("sample_initial_condition: problem '" + spec.name + "' has no initial condition");
  }
  const Mesh mesh = spec.mesh();
  const auto& ic = spec.initial;
  ParticleBank bank;
  if (n_p == 0) return bank;
  const double w = initial_mass(spec) / static_cast<double>(n_p);
  std::uint64_t redrawn = 0;
  bank.particles.reserve(n_p);
  for (std::uint64_t k = 0; k < n_p; ++k) {
    CounterRng rng(rng_key, k);
    Particle p;
    while (true) {
      // Box-Muller: r^2 is exponential with mean 2 var.
      const double r = std::sqrt(-2.0 * ic.variance * std::log(rng.uniform_open()));
      const double theta = 2.0 * kPi * rng.uniform();
      p.pos = {ic.center.x + r * std::cos(theta), ic.center.y + r * std::sin(theta)};
      if (mesh.contains(p.pos)) break;
      ++redrawn;
    }
    const double u_mu = rng.uniform();
    const double u_phi = rng.uniform();
    p.dir = sample_isotropic_upper(u_mu, u_phi);
    p.weight = w;
    p.residual = dt;
    bank.particles.push_back(p);
  }
  bank.born = n_p;
  if (redraws) *redraws = redrawn;
  return bank;
}

DgField project_initial_condition(const ProblemSpec& spec, const Mesh& mesh, std::size_t ordinates) {
  if (spec.initial.kind == InitialKind::None) return DgField(ordinates, mesh.cell_count());
  const auto& ic = spec.initial;
  const double var = ic.variance;
  const double norm = 1.0 / std::sqrt(2.0 * kPi * var);
  auto moments = [var, norm](double mean) {
    return [var, norm, mean](double a, double b) -> std::array<double, 2> {
      const double m0 = normal_mass(a, b, mean, var);
      const double ga = norm * std::exp(-(a - mean) * (a - mean) / (2.0 * var));
      const double gb = norm * std::exp(-(b - mean) * (b - mean) / (2.0 * var));
      return {m0, mean * m0 + var * (ga - gb)};
    };
  };
  SeparableMoments sm{moments(ic.center.x), moments(ic.center.y), 1.0 / kFourPi};
  return project_isotropic(mesh, ordinates, sm);
}

namespace {

std::string rect_text(const Rect& r) {
  return format_double(r.x0) + " " + format_double(r.y0) + " " + format_double(r.x1) + " " + format_double(r.y1);
}

}  // namespace

void write_problem(std::ostream& out, const ProblemSpec& spec) {
  out << "# " << spec.name << "\n";
  out << "[mesh]\n";
  out << "name = " << spec.name << "\n";
  out << "x_min = " << format_double(spec.x_min) << "\n";
  out << "y_min = " << format_double(spec.y_min) << "\n";
  out << "length = " << format_double(spec.length) << "\n";
  out << "n_x = " << spec.n_x << "\n\n";
  out << "[materials]\n";
  out << "# region = x0 y0 x1 y1 sigma_t sigma_s   (later regions override)\n";
  for (const auto& m : spec.materials)
    out << "region = " << rect_text(m.box) << " " << format_double(m.sigma_t) << " " << format_double(m.sigma_s) << "\n";
  out << "\n[source]\n";
  out << "# region = x0 y0 x1 y1 rate\n";
  for (const auto& s : spec.sources) out << "region = " << rect_text(s.box) << " " << format_double(s.rate) << "\n";
  out << "\n[initial]\n";
  if (spec.initial.kind == InitialKind::Gaussian) {
    out << "kind = gaussian\n";
    out << "variance = " << format_double(spec.initial.variance) << "\n";
    out << "center = " << format_double(spec.initial.center.x) << " " << format_double(spec.initial.center.y) << "\n";
  } else {
    out << "kind = none\n";
  }
  out << "\n[boundary]\n";
  if (spec.boundary.kind == BoundaryKind::LeftInflux) {
    out << "kind = left_influx\n";
    out << "value = " << format_double(spec.boundary.value) << "\n";
  } else {
    out << "kind = vacuum\n";
  }
  out << "\n[run]\n";
  out << "t_final = " << format_double(spec.t_final) << "\n";
  out << "cfl = " << format_double(spec.cfl) << "\n";
  out << "n = " << spec.run.quadrature << "\n";
  out << "np = " << spec.run.particles << "\n";
  out << "delta = " << format_double(spec.run.tolerance) << "\n";
  out << "w_kill = " << format_double(spec.run.w_kill) << "\n";
  out << "seed = " << spec.run.seed << "\n";
}

namespace {

const KvSection& require(const KvDocument& doc, const std::string& name) {
  const KvSection* s = doc.first(name);
  if (!s) throw ConfigError("problem file: missing [" + name + "] section");
  return *s;
}

std::vector<double> numbers(const std::string& text, std::size_t count, const std::string& what) {
  auto v = parse_numbers(text);
  if (v.size() != count) {
    throw ConfigError("problem file: " + what + " needs " + std::to_string(count) + " numbers, got '" + text + "'");
  }
  return v;
}

}  // namespace

ProblemSpec read_problem(std::istream& in) {
  const KvDocument doc = parse_keyvalue(in);
  ProblemSpec p;
  const auto& mesh = require(doc, "mesh");
  p.name = mesh.get_string("name", "problem");
  p.x_min = mesh.get_double("x_min");
  p.y_min = mesh.get_double("y_min");
  p.length = mesh.get_double("length");
  p.n_x = static_cast<int>(mesh.get_int("n_x"));

  if (const auto* mats = doc.first("materials")) {
    for (const auto& text : mats->all("region")) {
      const auto v = numbers(text, 6, "material region");
      p.materials.push_back({{v[0], v[1], v[2], v[3]}, v[4], v[5]});
    }
  }
  if (const auto* src = doc.first("source")) {
    for (const auto& text : src->all("region")) {
      const auto v = numbers(text, 5, "source region");
      p.sources.push_back({{v[0], v[1], v[2], v[3]}, v[4]});
    }
  }
  if (const auto* ic = doc.first("initial")) {
    const std::string kind = ic->get_string("kind", "none");
    if (kind == "gaussian") {
      p.initial.kind = InitialKind::Gaussian;
      p.initial.variance = ic->get_double("variance");
      const auto c = numbers(ic->get_string("center", "0 0"), 2, "initial center");
      p.initial.center = {c[0], c[1]};
    } else if (kind != "none") {
      throw ConfigError("problem file: unknown initial kind '" + kind + "'");
    }
  }
  if (const auto* bc = doc.first("boundary")) {
    const std::string kind = bc->get_string("kind", "vacuum");
    if (kind == "left_influx") {
      p.boundary = {BoundaryKind::LeftInflux, bc->get_double("value")};
    } else if (kind != "vacuum") {
      throw ConfigError("problem file: unknown boundary kind '" + kind + "'");
    }
  }
  const auto& run = require(doc, "run");
  p.t_final = run.get_double("t_final");
  p.cfl = run.get_double("cfl");
  p.run.quadrature = static_cast<int>(run.get_int("n", p.run.quadrature));
  p.run.particles = run.get_uint("np", p.run.particles);
  p.run.tolerance = run.get_double("delta", p.run.tolerance);
  p.run.w_kill = run.get_double("w_kill", p.run.w_kill);
  p.run.seed = run.get_uint("seed", p.run.seed);
  p.validate();
  return p;
}

ProblemSpec read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  return read_problem(in);
}

void write_problem_file(const std::string& path, const ProblemSpec& spec) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write problem file '" + path + "'");
  write_problem(out, spec);
}

}  // namespace kinhybrid
