#include "statediv/geodesics.hpp"

#include <algorithm>
#include <cmath>

#include "statediv/quadrature.hpp"

namespace statediv {

namespace {

using linalg::symmetrize;

// (e^β − 1)/β, continued by 1 at β = 0.
double phi(double beta) {
  if (std::abs(beta) < 1e-15) return 1.0 + 0.5 * beta;
  return std::expm1(beta) / beta;
}

Matrix in_basis(const Matrix& q, const Vector& diag) { return symmetrize(q * diag.asDiagonal() * q.transpose()); }

EllipticFamily family_for_kappa(double kappa) {
  return kappa == 1.0 ? EllipticFamily::gaussian() : EllipticFamily::custom_kappa(kappa);
}

void require_kind(const GeodesicPath& path, PathKind kind, const char* what) {
  if (path.kind != kind) throw Error(ErrorCode::InvalidArgument, std::string(what) + " called on a different path kind");
}

void require_endpoint(const GeodesicPath& path, const EllipticDist& target) {
  if (!endpoint_matches(path.point(1.0), target)) {
    throw Error(ErrorCode::EndpointMismatch, "geodesic does not reach the target at t = 1");
  }
}

double kw_xi(const GeodesicPath& path, Index i, double t) {
  const double kappa_s0 = path.start.kappa() * path.components.s0(i);
  return (kappa_s0 + path.lambda) * std::exp(-2.0 * path.lambda * path.components.beta(i) * t) - kappa_s0;
}

// (√(λ/ξ_t) − 1)/β, equal to t(κs0 + λ) when β = 0
double kw_mean_weight(double kappa_s0, double lambda, double beta, double t) {
  const double y = -2.0 * lambda * beta * t;
  const double xi = (kappa_s0 + lambda) * std::exp(y) - kappa_s0;
  return 2.0 * lambda * t * (kappa_s0 + lambda) * phi(y) / (xi * (std::sqrt(lambda / xi) + 1.0));
}

}  // namespace

bool endpoint_matches(const EllipticDist& a, const EllipticDist& b, double tol) {
  if (a.dim() != b.dim() || !(a.family == b.family)) return false;
  const double scale_size = b.scale.matrix().cwiseAbs().maxCoeff();
  const double mean_unit = std::max(1.0, std::sqrt(b.scale.max_eigenvalue()));
  const double mean_err = (a.mean - b.mean).cwiseAbs().maxCoeff();
  const double scale_err = (a.scale.matrix() - b.scale.matrix()).cwiseAbs().maxCoeff();
  return mean_err <= tol * mean_unit && scale_err <= tol * scale_size;
}

EllipticDist GeodesicPath::point(double t) const {
  switch (kind) {
    case PathKind::Wkl: return wkl_point(*this, t);
    case PathKind::Kw: return kw_point(*this, t);
    case PathKind::SteinBilinear: return stein_point(*this, t);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown path kind");
}

GeodesicPath wkl_path(const EllipticDist& mu0, const EllipticDist& mu1) {
  if (mu0.dim() != mu1.dim()) throw Error(ErrorCode::DimensionMismatch, "distributions differ in dimension");
  if (!(mu0.family == mu1.family)) throw Error(ErrorCode::FamilyMismatch, "distributions belong to different families");
  if (!mu0.scale.is_strict() || !mu1.scale.is_strict()) {
    throw Error(ErrorCode::DegenerateCovariance, "scale matrices must be positive definite");
  }
  // B = log(Σ0^{-1/2}(Σ0^{1/2}Σ1Σ0^{1/2})^{1/2}Σ0^{-1/2})
  const Matrix root0 = linalg::sqrtm_spd(mu0.scale).matrix();
  const Matrix inv_root0 = linalg::inv_sqrtm_spd(mu0.scale);
  const SpdMatrix middle(symmetrize(root0 * mu1.scale.matrix() * root0));
  const Matrix transport = symmetrize(inv_root0 * linalg::sqrtm_spd(middle).matrix() * inv_root0);
  const linalg::SymmetricEigen eig = linalg::eig_sym(transport);
  const Index d = mu0.dim();

  Vector beta(d), exp_beta(d), inv_phi(d);
  for (Index i = 0; i < d; ++i) {
    beta(i) = std::log(eig.values(i));
    exp_beta(i) = eig.values(i);
    const double p = phi(beta(i));
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::DegenerateCovariance, "(e^B − I)B† + B^⊥ is not invertible");
    }
    inv_phi(i) = 1.0 / p;
  }
  const Matrix& v = eig.vectors;
  // b = ((e^B − I)B† + B^⊥)⁻¹(m1 − e^B m0)
  const Vector rhs = mu1.mean - in_basis(v, exp_beta) * mu0.mean;
  const Vector b = in_basis(v, inv_phi) * rhs;

  GeodesicPath path{PathKind::Wkl, 0.0, QuadraticPotential(in_basis(v, beta), b), mu0, {}};
  path.components.q = v;
  path.components.beta = beta;
  require_endpoint(path, mu1);
  return path;
}

EllipticDist wkl_point(const GeodesicPath& path, double t) {
  require_kind(path, PathKind::Wkl, "wkl_point");
  const Matrix& v = path.components.q;
  const Vector& beta = path.components.beta;
  Vector growth(beta.size()), drift(beta.size());
  for (Index i = 0; i < beta.size(); ++i) {
    growth(i) = std::exp(t * beta(i));
    drift(i) = t * phi(t * beta(i));  // (e^{tβ} − 1)/β, or t on ker B
  }
  const Matrix e_tb = in_basis(v, growth);
  const Matrix scale = symmetrize(e_tb * path.start.scale.matrix() * e_tb);
  const Vector mean = e_tb * path.start.mean + in_basis(v, drift) * path.potential.b;
  return EllipticDist(mean, SpdMatrix(scale), path.start.family);
}

GeodesicPath kw_path(const EllipticDist& mu0, const EllipticDist& mu1, double lambda, double branch_tol) {
  if (mu0.dim() != mu1.dim()) throw Error(ErrorCode::DimensionMismatch, "distributions differ in dimension");
  if (!(mu0.family == mu1.family)) throw Error(ErrorCode::FamilyMismatch, "distributions belong to different families");
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  const double kappa = mu0.kappa();
  const Matrix q = linalg::shared_eigenbasis({&mu0.scale.matrix(), &mu1.scale.matrix()});
  const Vector s0 = linalg::diagonal_in_basis(q, mu0.scale.matrix());
  const Vector s1 = linalg::diagonal_in_basis(q, mu1.scale.matrix());
  const Vector m0 = q.transpose() * mu0.mean;
  const Vector m1 = q.transpose() * mu1.mean;
  const Index d = mu0.dim();

  Vector beta = Vector::Zero(d), b_tilde(d);
  for (Index i = 0; i < d; ++i) {
    if (std::abs(s0(i) - s1(i)) <= branch_tol * std::max(s0(i), s1(i))) {
      b_tilde(i) = (m1(i) - m0(i)) / (kappa * s0(i) + lambda);
      continue;
    }
    beta(i) = std::log1p(lambda * (s1(i) - s0(i)) / (s0(i) * (lambda + kappa * s1(i)))) / (2.0 * lambda);
    b_tilde(i) = (m1(i) - m0(i)) / kw_mean_weight(kappa * s0(i), lambda, beta(i), 1.0) - beta(i) * m0(i);
  }

  GeodesicPath path{PathKind::Kw, lambda, QuadraticPotential(in_basis(q, beta), q * b_tilde), mu0, {}};
  path.components.q = q;
  path.components.beta = beta;
  path.components.s0 = s0;
  path.components.b_tilde = b_tilde;
  path.components.m0_tilde = m0;
  for (int k = 0; k <= 100; ++k) {
    for (Index i = 0; i < d; ++i) {
      const double xi = kw_xi(path, i, k / 100.0);
      if (!(xi > 0.0) || !std::isfinite(xi)) {
        throw Error(ErrorCode::GeodesicBlowup, "scale component leaves (0, inf) on [0, 1]");
      }
    }
  }
  require_endpoint(path, mu1);
  return path;
}

EllipticDist kw_point(const GeodesicPath& path, double t) {
  require_kind(path, PathKind::Kw, "kw_point");
  const ComponentBasis& c = path.components;
  const double kappa = path.start.kappa();
  const double lambda = path.lambda;
  const Index d = c.s0.size();
  Vector s(d), m(d);
  for (Index i = 0; i < d; ++i) {
    if (c.beta(i) == 0.0) {
      s(i) = c.s0(i);
      m(i) = c.m0_tilde(i) + t * (kappa * c.s0(i) + lambda) * c.b_tilde(i);
      continue;
    }
    const double xi = kw_xi(path, i, t);
    if (!(xi > 0.0) || !std::isfinite(xi)) {
      throw Error(ErrorCode::GeodesicBlowup, "scale component leaves (0, inf)");
    }
    s(i) = lambda * c.s0(i) / xi;
    const double weight = kw_mean_weight(kappa * c.s0(i), lambda, c.beta(i), t);
    m(i) = c.m0_tilde(i) + (c.beta(i) * c.m0_tilde(i) + c.b_tilde(i)) * weight;
  }
  return EllipticDist(c.q * m, SpdMatrix(in_basis(c.q, s)), path.start.family);
}

GeodesicPath stein_path(const SpdMatrix& scale0, const SpdMatrix& scale1, const SpdMatrix& kernel,
                        const EllipticFamily& family) {
  if (scale0.dim() != scale1.dim() || scale0.dim() != kernel.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "Stein operands differ in dimension");
  }
  const double kappa = statediv::kappa(family);
  const Matrix q = linalg::shared_eigenbasis({&scale0.matrix(), &scale1.matrix(), &kernel.matrix()});
  const Vector s0 = linalg::diagonal_in_basis(q, scale0.matrix());
  const Vector s1 = linalg::diagonal_in_basis(q, scale1.matrix());
  const Vector a = linalg::diagonal_in_basis(q, kernel.matrix());
  const Index d = s0.size();
  // B = (1/2κ) A⁻¹(Σ0⁻¹ − Σ1⁻¹)
  Vector beta(d);
  for (Index i = 0; i < d; ++i) beta(i) = (1.0 / s0(i) - 1.0 / s1(i)) / (2.0 * kappa * a(i));

  const EllipticDist start(Vector::Zero(d), scale0, family);
  GeodesicPath path{PathKind::SteinBilinear, 0.0, QuadraticPotential(in_basis(q, beta), Vector::Zero(d)), start, {}};
  path.components.q = q;
  path.components.beta = beta;
  path.components.s0 = s0;
  path.components.kernel = a;
  require_endpoint(path, EllipticDist(Vector::Zero(d), scale1, family));
  return path;
}

GeodesicPath stein_path(const SpdMatrix& scale0, const SpdMatrix& scale1, const SpdMatrix& kernel, double kappa) {
  return stein_path(scale0, scale1, kernel, family_for_kappa(kappa));
}

EllipticDist stein_point(const GeodesicPath& path, double t) {
  require_kind(path, PathKind::SteinBilinear, "stein_point");
  const ComponentBasis& c = path.components;
  const double kappa = path.start.kappa();
  Vector sigma(c.s0.size());
  for (Index i = 0; i < sigma.size(); ++i) {
    const double denom = 1.0 / c.s0(i) - 2.0 * kappa * c.kernel(i) * c.beta(i) * t;
    if (!(denom > 0.0)) throw Error(ErrorCode::GeodesicBlowup, "Stein scale component blows up");
    sigma(i) = 1.0 / denom;
  }
  return EllipticDist(Vector::Zero(sigma.size()), SpdMatrix(in_basis(c.q, sigma)), path.start.family);
}

double divergence_quadrature(const GeodesicPath& path, const EllipticDist& target, int n) {
  if (n < 8) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least 8 nodes");
  const EllipticDist end = path.point(1.0);
  if (!endpoint_matches(end, target)) {
    throw Error(ErrorCode::EndpointMismatch, "path does not end at the target distribution");
  }
  const QuadraticPotential f(path.potential.B, path.potential.b, 0.0);
  const QuadratureRule rule = gauss_legendre(n, 0.0, 1.0);
  const double integral = rule.integrate([&](double t) { return expect_quadratic(path.point(t), f); });
  return expect_quadratic(end, f) - integral;
}

}  // namespace statediv
