#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "fedres/vec.hpp"

namespace fedres {

/// Counter-based deterministic random stream (SplitMix64 core). Streams are
/// derived from a key tuple, so draws are reproducible and independent of
/// evaluation order across workers/rounds/slots.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal draw via Box-Muller (one value per call).
  double next_normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec normal_vec(std::size_t d, double scale = 1.0) {
    Vec v(d);
    for (auto& x : v) x = scale * next_normal();
    return v;
  }

 private:
  std::uint64_t state_;
};

/// Stream purposes keep draws for different mechanisms disjoint.
enum class StreamKind : std::uint64_t {
  Partition = 1,
  Minibatch = 2,
  Attack = 3,
  Synthetic = 4,
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derive the stream keyed by (seed, kind, worker, round, slot).
inline Rng keyed_stream(std::uint64_t seed, StreamKind kind, std::uint64_t worker = 0,
                        std::uint64_t round = 0, std::uint64_t slot = 0) {
  std::uint64_t h = seed;
  for (std::uint64_t part : {static_cast<std::uint64_t>(kind), worker, round, slot}) {
    h = detail::mix64(h ^ (part + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
  }
  return Rng(h);
}

}  // namespace fedres
