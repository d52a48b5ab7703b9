#pragma once

// Elliptic distributions E(m, Σ, g). Downstream code only ever needs the
// family constant κ_g relating the scale matrix to the covariance, so the
// generator g is represented by a tag plus that constant.

#include <string>

#include "statediv/linalg.hpp"

namespace statediv {

class EllipticFamily {
 public:
  enum class Kind { Gaussian, StudentT, CustomKappa };

  static EllipticFamily gaussian() { return EllipticFamily(Kind::Gaussian, 0.0); }
  /// Requires dof > 2 (finite covariance); throws InvalidFamily otherwise.
  static EllipticFamily student_t(double dof);
  /// Requires kappa > 0; throws InvalidFamily otherwise.
  static EllipticFamily custom_kappa(double kappa);

  Kind kind() const noexcept { return kind_; }
  /// Degrees of freedom for StudentT, κ for CustomKappa, 0 for Gaussian.
  double parameter() const noexcept { return parameter_; }
  bool is_gaussian() const noexcept { return kind_ == Kind::Gaussian; }

  std::string to_string() const;

  friend bool operator==(const EllipticFamily&, const EllipticFamily&) = default;

 private:
  EllipticFamily(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_;
  double parameter_;
};

/// Gaussian → 1, StudentT(v) → v/(v−2), CustomKappa(κ) → κ.
double kappa(const EllipticFamily& family);

/// E(mean, scale, family). The scale is SPD; covariance is κ_g·scale.
struct EllipticDist {
  EllipticDist(Vector mean, SpdMatrix scale, EllipticFamily family = EllipticFamily::gaussian());

  static EllipticDist gaussian(Vector mean, const Matrix& cov) {
    return EllipticDist(std::move(mean), SpdMatrix(cov));
  }

  Index dim() const noexcept { return mean.size(); }
  double kappa() const { return statediv::kappa(family); }

  Vector mean;
  SpdMatrix scale;
  EllipticFamily family;
};

/// f(x) = ½xᵀBx + bᵀx + c with B symmetric.
struct QuadraticPotential {
  QuadraticPotential(const Matrix& quadratic, Vector linear, double constant = 0.0);

  Index dim() const noexcept { return b.size(); }

  double operator()(const Vector& x) const { return 0.5 * x.dot(B * x) + b.dot(x) + c; }

  Matrix B;
  Vector b;
  double c = 0.0;
};

SpdMatrix covariance(const EllipticDist& d);

/// Law of A·X + shift for X ~ d. Throws DegenerateScale when AΣAᵀ is singular.
EllipticDist affine_pushforward(const EllipticDist& d, const Matrix& a, const Vector& shift);

/// ∫ f dμ = (κ/2)tr(BΣ) + ½mᵀBm + bᵀm + c.
double expect_quadratic(const EllipticDist& d, const QuadraticPotential& f);

/// The potential x ↦ f(A·x + shift), rewritten in quadratic form.
QuadraticPotential compose_affine(const QuadraticPotential& f, const Matrix& a, const Vector& shift);

}  // namespace statediv
