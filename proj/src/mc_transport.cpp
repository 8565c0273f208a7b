#include "kinhybrid/mc_transport.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "kinhybrid/errors.hpp"
#include "kinhybrid/parallel.hpp"
#include "kinhybrid/rng.hpp"

namespace kinhybrid {

double ParticleBank::total_weight() const {
  double sum = 0.0;
  for (const auto& p : particles) sum += p.weight;
  return sum;
}

void ParticleBank::absorb(ParticleBank&& other) {
  particles.insert(particles.end(), other.particles.begin(), other.particles.end());
  born += other.born;
  other.particles.clear();
}

double CellTally::total() const {
  double sum = 0.0;
  for (double v : raw_) sum += v;
  return sum;
}

void CellTally::clear() { std::fill(raw_.begin(), raw_.end(), 0.0); }

void CellTally::merge(const CellTally& other) {
  if (other.raw_.size() != raw_.size()) throw ContractViolation("CellTally::merge: size mismatch");
  for (std::size_t c = 0; c < raw_.size(); ++c) raw_[c] += other.raw_[c];
}

std::vector<double> CellTally::flux(const Mesh& mesh, double dt) const {
  const double scale = 1.0 / (mesh.cell_area() * dt);
  std::vector<double> out(raw_.size());
  for (std::size_t c = 0; c < raw_.size(); ++c) out[c] = raw_[c] * scale;
  return out;
}

Direction3 sample_isotropic_upper(double u_mu, double u_phi) {
  const double mu = std::abs(2.0 * u_mu - 1.0);
  const double r = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  const double phi = 2.0 * kPi * u_phi;
  return {r * std::cos(phi), r * std::sin(phi), mu};
}

namespace {

Particle sample_in_cell(const Mesh& mesh, CellIndex c, double dt, double weight, CounterRng& rng) {
  Particle p;
  const double x0 = mesh.x_min() + c.i * mesh.h();
  const double y0 = mesh.y_min() + c.j * mesh.h();
  p.pos = {x0 + rng.uniform() * mesh.h(), y0 + rng.uniform() * mesh.h()};
  const double u_mu = rng.uniform();
  const double u_phi = rng.uniform();
  p.dir = sample_isotropic_upper(u_mu, u_phi);
  p.residual = rng.uniform_open() * dt;
  p.weight = weight;
  return p;
}

}  // namespace

ParticleBank sample_volume_source(const Mesh& mesh, std::span<const double> rate, double dt, std::uint64_t n_p,
                                  std::uint64_t rng_key, WeightConvention convention) {
  if (rate.size() != mesh.cell_count()) throw ContractViolation("sample_volume_source: rate size does not match mesh");
  ParticleBank bank;
  const double area = mesh.cell_area();
  double total = 0.0;
  for (double s : rate) {
    if (s < 0.0) throw ContractViolation("sample_volume_source: negative source rate");
    total += s * area * dt;
  }
  if (!(total > 0.0) || n_p == 0) return bank;

  std::vector<std::uint64_t> counts(rate.size());
  std::uint64_t sum_counts = 0;
  for (std::size_t c = 0; c < rate.size(); ++c) {
    const double wc = rate[c] * area * dt;
    counts[c] = static_cast<std::uint64_t>(std::floor(wc * static_cast<double>(n_p) / total));
    sum_counts += counts[c];
  }
  if (sum_counts == 0) return bank;

  bank.particles.reserve(sum_counts);
  const double global_weight = total / static_cast<double>(sum_counts);
  std::uint64_t ordinal = 0;
  for (std::size_t c = 0; c < rate.size(); ++c) {
    if (counts[c] == 0) continue;
    const double w = convention == WeightConvention::Global
                         ? global_weight
                         : rate[c] * area * dt / static_cast<double>(counts[c]);
    const CellIndex cell = mesh.cell(c);
    for (std::uint64_t k = 0; k < counts[c]; ++k) {
      CounterRng rng(rng_key, ordinal++);
      bank.particles.push_back(sample_in_cell(mesh, cell, dt, w, rng));
    }
  }
  bank.born = sum_counts;
  return bank;
}

ParticleBank sample_boundary_source_left(const Mesh& mesh, double value, double dt, std::uint64_t n_p,
                                         std::uint64_t rng_key) {
  if (value < 0.0) throw ContractViolation("sample_boundary_source_left: negative inflow");
  ParticleBank bank;
  if (value == 0.0 || n_p == 0) return bank;
  const double length = mesh.y_max() - mesh.y_min();
  const double w = value * length * kPi * dt / static_cast<double>(n_p);
  bank.particles.reserve(n_p);
  for (std::uint64_t k = 0; k < n_p; ++k) {
    CounterRng rng(rng_key, k);
    Particle p;
    p.pos = {mesh.x_min(), mesh.y_min() + rng.uniform() * length};
    // F(mu) = mu^2 for the cosine-weighted inflow through the face.
    const double mu = std::sqrt(rng.uniform());
    const double rest = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    const double psi = kPi * rng.uniform();
    p.dir = {mu, rest * std::cos(psi), rest * std::sin(psi)};
    p.residual = rng.uniform_open() * dt;
    p.weight = w;
    bank.particles.push_back(p);
  }
  bank.born = n_p;
  return bank;
}

namespace {

// Returns false if the particle left the domain.
bool fly(Particle& p, const Mesh& mesh, std::span<const double> lambda, std::span<double> tally) {
  const Point2 planar{p.dir.x, p.dir.y};
  double w = p.weight;
  const RayExit exit = mesh.walk_ray(p.pos, planar, p.residual, [&](CellIndex cell, double, double len) {
    const std::size_t c = mesh.index(cell);
    const double tau = lambda[c] * len;
    if (tau > 0.0) {
      tally[c] += w * -std::expm1(-tau) / lambda[c];
      w *= std::exp(-tau);
    } else {
      tally[c] += w * len;
    }
  });
  p.weight = w;
  if (exit.exited) return false;
  p.pos = {p.pos.x + p.residual * p.dir.x, p.pos.y + p.residual * p.dir.y};
  // Roundoff can push a particle that ends on the boundary just outside.
  p.pos.x = std::clamp(p.pos.x, mesh.x_min(), mesh.x_max());
  p.pos.y = std::clamp(p.pos.y, mesh.y_min(), mesh.y_max());
  return true;
}

}  // namespace

std::uint64_t advance_and_tally(ParticleBank& bank, const Mesh& mesh, std::span<const double> lambda, double dt,
                                CellTally& tally, int workers) {
  if (lambda.size() != mesh.cell_count() || tally.size() != mesh.cell_count()) {
    throw ContractViolation("advance_and_tally: field sizes do not match mesh");
  }
  const std::size_t count = bank.particles.size();
  std::vector<char> alive(count, 1);
  const int w = std::max(1, workers);
  if (w == 1) {
    for (std::size_t k = 0; k < count; ++k) alive[k] = fly(bank.particles[k], mesh, lambda, tally.raw()) ? 1 : 0;
  } else {
    std::vector<CellTally> partial(static_cast<std::size_t>(w), CellTally(mesh.cell_count()));
    for_each_chunk(count, w, [&](std::size_t begin, std::size_t end, int worker) {
      auto raw = partial[static_cast<std::size_t>(worker)].raw();
      for (std::size_t k = begin; k < end; ++k) alive[k] = fly(bank.particles[k], mesh, lambda, raw) ? 1 : 0;
    });
    for (const auto& t : partial) tally.merge(t);
  }

  std::size_t kept = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (!alive[k]) continue;
    Particle& p = bank.particles[k];
    p.residual = dt;
    bank.particles[kept++] = p;
  }
  bank.particles.resize(kept);
  bank.moved += count;
  return count;
}

void russian_roulette(ParticleBank& bank, double w_kill, std::uint64_t rng_key) {
  if (!(w_kill > 0.0)) throw ContractViolation("russian_roulette: w_kill must be positive");
  std::size_t kept = 0;
  for (std::size_t k = 0; k < bank.particles.size(); ++k) {
    Particle p = bank.particles[k];
    if (p.weight < w_kill) {
      CounterRng rng(rng_key, k);
      if (!(rng.uniform() < p.weight / w_kill)) continue;
      p.weight = w_kill;
    }
    bank.particles[kept++] = p;
  }
  bank.particles.resize(kept);
}

void write_bank(std::ostream& out, const ParticleBank& bank) {
  out << "# x y ox oy oz w tau\n";
  out << std::setprecision(17);
  for (const auto& p : bank.particles) {
    out << p.pos.x << ' ' << p.pos.y << ' ' << p.dir.x << ' ' << p.dir.y << ' ' << p.dir.z << ' ' << p.weight << ' '
        << p.residual << '\n';
  }
}

ParticleBank read_bank(std::istream& in) {
  ParticleBank bank;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    Particle p;
    if (!(row >> p.pos.x >> p.pos.y >> p.dir.x >> p.dir.y >> p.dir.z >> p.weight >> p.residual)) {
      throw ConfigError("read_bank: malformed line: " + line);
    }
    bank.particles.push_back(p);
  }
  return bank;
}

}  // namespace kinhybrid
