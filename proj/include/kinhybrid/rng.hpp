#pragma once

#include <cstdint>

namespace kinhybrid {

/// Independent random streams of one run. Changing the particle count of one
/// stage never shifts the numbers another stage sees.
enum class Stream : std::uint64_t {
  InitialCondition = 1,
  ExternalVolume = 2,
  ExternalBoundary = 3,
  UncollidedRoulette = 4,
  Relabel = 5,
  RelabelRoulette = 6,
};

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of one (seed, stream, step) triple.
constexpr std::uint64_t stream_key(std::uint64_t seed, Stream stream, std::uint64_t step) {
  std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
  k = mix64(k ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
  return mix64(k ^ (step * 0x8cb92ba72f3d8dd7ULL + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator for a single particle: the sequence depends only
/// on (key, ordinal), so any partition of particles across workers draws
/// identical numbers.
class CounterRng {
 public:
  CounterRng(std::uint64_t key, std::uint64_t ordinal) : state_(mix64(key ^ mix64(ordinal + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace kinhybrid
