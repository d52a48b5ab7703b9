#pragma once

// Closed-form divergences between elliptic distributions. All functions are
// D(μ0 | μ1) with μ0 the start of the geodesic and μ1 its end point.

#include <map>
#include <string>
#include <vector>

#include "statediv/elliptic.hpp"

namespace statediv {

/// Outputs in [−kClipTol, 0) are reported as 0 with `clipped` set.
inline constexpr double kClipTol = 1e-10;

struct DivergenceResult {
  double value = 0.0;
  bool clipped = false;
  /// Intermediate matrices (R, Q, B, b, Xi, basis, ...) keyed by name.
  std::map<std::string, Matrix> diagnostics;
  std::vector<std::string> warnings;
};

/// Kullback–Leibler divergence KL(μ0 | μ1) between Gaussians.
DivergenceResult kl_gaussian(const EllipticDist& mu0, const EllipticDist& mu1);

/// Wasserstein-KL divergence, general (non-commuting) closed form.
DivergenceResult wkl(const EllipticDist& mu0, const EllipticDist& mu1);

/// The simplified WKL expression valid when Σ0Σ1 = Σ1Σ0. Throws
/// NonCommutingScales otherwise.
DivergenceResult wkl_commuting(const EllipticDist& mu0, const EllipticDist& mu1);

/// Kalman–Wasserstein-KL divergence for commuting scale matrices.
DivergenceResult kwkl(const EllipticDist& mu0, const EllipticDist& mu1, double lambda);

/// ½Δmᵀ(κΣ + λI)⁻¹Δm: the equal-scale Kalman–Wasserstein divergence.
DivergenceResult kw_same_variance(const Vector& m0, const Vector& m1, const SpdMatrix& scale, double kappa,
                                  double lambda);

/// Stein divergence with bilinear kernel K(x,y) = xᵀAy + a between centred
/// distributions with pairwise commuting Σ0, Σ1, A.
DivergenceResult stein_bilinear(const SpdMatrix& scale0, const SpdMatrix& scale1, const SpdMatrix& kernel);

/// Linearized-Wasserstein (Coulomb MMD) divergence for 1-D Gaussians.
DivergenceResult coulomb_1d(const EllipticDist& mu0, const EllipticDist& mu1);

namespace detail {

/// E|Z| for Z ~ N(mean, sd²).
double folded_normal_mean(double mean, double sd);

/// 1 + eʸ(y − 1), accurate for small |y|.
double one_plus_exp_times_y_minus_one(double y);

/// log1p(x) − x, accurate for small |x|.
double log1p_minus_x(double x);

}  // namespace detail

}  // namespace statediv
