#pragma once

// Reproducible Gaussian noise. The bit-level contract (generator, seeding,
// uniform mapping, Box–Muller order) is documented in docs/PRNG.md.

#include <cstdint>
#include <optional>
#include <random>

#include "statediv/linalg.hpp"

namespace statediv {

class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}

  /// ((x >> 11) + 0.5)·2⁻⁵³ for the next 64-bit output x; lies in (0, 1).
  double uniform();

  /// Box–Muller: each pair of uniforms yields the cosine draw, then the sine draw.
  double standard_normal();

  /// n independent standard normals.
  Vector standard_normal(Index n);

  /// factor · z with z standard normal; factor from noise_factor().
  Vector sample(const Matrix& factor);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Lower Cholesky factor of a PSD covariance, or its symmetric square root
/// when the covariance is singular. A zero matrix gives a zero factor.
Matrix noise_factor(const Matrix& cov);

}  // namespace statediv
