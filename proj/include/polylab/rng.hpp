#pragma once

#include "polylab/common.hpp"

#include <cstdint>
#include <random>

namespace polylab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seeded generator. Conversions to doubles/normals/Poisson are implemented
/// here rather than through <random> distributions so that streams are
/// bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Counter-based child stream: depends only on (root, stream, index).
  static Rng derive(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(root ^ splitmix64(stream + 0x632BE59BD9B4E019ull)) +
                          splitmix64(index)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  double normal();

  /// Unit vector uniform on S^{d-1}.
  Vec direction(int d);

  /// Poisson variate: inversion for mean < 30, PTRS transformed rejection otherwise.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace polylab
