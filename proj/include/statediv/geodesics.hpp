#pragma once

// Analytic dual geodesics between elliptic distributions and the quadrature
// oracle D = F(γ(1)) − ∫₀¹ F(γ(t)) dt, where F is the expected quadratic
// potential generating the path. The oracle never touches the closed forms
// in divergences.hpp.

#include <optional>

#include "statediv/elliptic.hpp"

namespace statediv {

enum class PathKind { Wkl, Kw, SteinBilinear };

/// Threshold below which |s0ᵢ − s1ᵢ|/max(s0ᵢ, s1ᵢ) selects the β = 0 branch.
inline constexpr double kKwBranchTol = 1e-12;

/// Eigencomponent representation shared by the three path kinds.
struct ComponentBasis {
  Matrix q;          // orthogonal basis (columns)
  Vector beta;       // eigenvalues of the potential's quadratic part
  Vector s0;         // start scale eigenvalues (KW, Stein)
  Vector b_tilde;    // linear part in the basis (KW)
  Vector m0_tilde;   // start mean in the basis (KW)
  Vector kernel;     // kernel eigenvalues (Stein)
};

struct GeodesicPath {
  PathKind kind;
  double lambda = 0.0;
  QuadraticPotential potential;
  EllipticDist start;
  ComponentBasis components;

  EllipticDist point(double t) const;
};

/// Wasserstein geodesic generated by f(x) = ½xᵀBx + bᵀx.
GeodesicPath wkl_path(const EllipticDist& mu0, const EllipticDist& mu1);
EllipticDist wkl_point(const GeodesicPath& path, double t);

/// Kalman–Wasserstein geodesic; Σ0 and Σ1 must commute.
GeodesicPath kw_path(const EllipticDist& mu0, const EllipticDist& mu1, double lambda,
                     double branch_tol = kKwBranchTol);
EllipticDist kw_point(const GeodesicPath& path, double t);

/// Centred Stein geodesic with bilinear kernel xᵀAy; Σ0, Σ1, A pairwise commuting.
GeodesicPath stein_path(const SpdMatrix& scale0, const SpdMatrix& scale1, const SpdMatrix& kernel,
                        const EllipticFamily& family);
GeodesicPath stein_path(const SpdMatrix& scale0, const SpdMatrix& scale1, const SpdMatrix& kernel, double kappa);
EllipticDist stein_point(const GeodesicPath& path, double t);

/// F(γ(1)) − ∫₀¹F(γ(t))dt with an n-node Gauss–Legendre rule (n ≥ 8).
/// Throws EndpointMismatch if the path does not end at `target`.
double divergence_quadrature(const GeodesicPath& path, const EllipticDist& target, int n = 128);

/// True when `a` reproduces `b` (means within tol per unit scale, scales within tol relative).
bool endpoint_matches(const EllipticDist& a, const EllipticDist& b, double tol = 1e-9);

}  // namespace statediv
