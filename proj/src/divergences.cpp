#include "statediv/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace statediv {

namespace {

using linalg::symmetrize;

DivergenceResult finalize(DivergenceResult r) {
  if (r.value < 0.0 && r.value >= -kClipTol) {
    r.value = 0.0;
    r.clipped = true;
  } else if (r.value < 0.0) {
    std::ostringstream os;
    os << "negative divergence " << r.value << " beyond the clipping tolerance";
    r.warnings.push_back(os.str());
  }
  return r;
}

void require_same_shape(const EllipticDist& mu0, const EllipticDist& mu1) {
  if (mu0.dim() != mu1.dim()) throw Error(ErrorCode::DimensionMismatch, "distributions differ in dimension");
  if (!(mu0.family == mu1.family)) throw Error(ErrorCode::FamilyMismatch, "distributions belong to different families");
  if (!mu0.scale.is_strict() || !mu1.scale.is_strict()) {
    throw Error(ErrorCode::DegenerateCovariance, "scale matrices must be positive definite");
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

double log_det(const SpdMatrix& m) {
  Eigen::LLT<Matrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateCovariance, "Cholesky factorization failed");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Matrix column(const Vector& v) { return v; }

// Mean-penalty weight of one eigendirection of the WKL transport map R = e^β:
// (r² log r² − r² + 1)/(r − 1)² off the kernel, 2 on it.
double wkl_mean_weight(double beta) {
  if (std::abs(beta) <= 1e-12) return 2.0;
  const double em1 = std::expm1(beta);
  return detail::one_plus_exp_times_y_minus_one(2.0 * beta) / (em1 * em1);
}

}  // namespace

namespace detail {

double folded_normal_mean(double mean, double sd) {
  if (sd == 0.0) return std::abs(mean);
  const double z = mean / sd;
  return sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) + mean * std::erf(z / std::numbers::sqrt2);
}

double one_plus_exp_times_y_minus_one(double y) {
  if (std::abs(y) > 0.5) return 1.0 + std::exp(y) * (y - 1.0);
  // Σ_{k≥2} (k−1)/k! · yᵏ
  double term = 1.0;  // yᵏ/k!
  double sum = 0.0;
  for (int k = 1; k < 40; ++k) {
    term *= y / k;
    if (k >= 2) sum += (k - 1) * term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double log1p_minus_x(double x) {
  if (std::abs(x) > 0.1) return std::log1p(x) - x;
  // Σ_{k≥2} (−1)^{k+1} xᵏ/k
  double power = x;
  double sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    power *= -x;
    const double term = power / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

DivergenceResult kl_gaussian(const EllipticDist& mu0, const EllipticDist& mu1) {
  if (!mu0.family.is_gaussian() || !mu1.family.is_gaussian()) {
    throw Error(ErrorCode::FamilyMismatch, "KL closed form requires Gaussian distributions");
  }
  require_same_shape(mu0, mu1);
  const Vector dm = mu1.mean - mu0.mean;
  const Matrix inv1 = mu1.scale.inverse();
  const Matrix d_scale = mu1.scale.matrix() - mu0.scale.matrix();
  DivergenceResult r;
  r.value = 0.5 * (dm.dot(inv1 * dm) - (inv1 * d_scale).trace() + log_det(mu1.scale) - log_det(mu0.scale));
  return finalize(std::move(r));
}

DivergenceResult wkl(const EllipticDist& mu0, const EllipticDist& mu1) {
  require_same_shape(mu0, mu1);
  const double kappa = mu0.kappa();
  const SpdMatrix root0 = linalg::sqrtm_spd(mu0.scale);
  const Matrix inv_root0 = linalg::inv_sqrtm_spd(mu0.scale);
  const SpdMatrix middle(symmetrize(root0.matrix() * mu1.scale.matrix() * root0.matrix()));
  const Matrix transport = symmetrize(inv_root0 * linalg::sqrtm_spd(middle).matrix() * inv_root0);

  const linalg::SymmetricEigen eig = linalg::eig_sym(transport);
  const Index d = mu0.dim();
  const Vector scale0_diag = linalg::diagonal_in_basis(eig.vectors, mu0.scale.matrix());
  const Vector dm = eig.vectors.transpose() * (mu1.mean - mu0.mean);

  double cov_term = 0.0;
  double mean_term = 0.0;
  Vector beta(d), mean_weight(d), kernel(d), q_diag(d);
  for (Index i = 0; i < d; ++i) {
    beta(i) = std::log(eig.values(i));
    cov_term += scale0_diag(i) * detail::one_plus_exp_times_y_minus_one(2.0 * beta(i));
    mean_weight(i) = wkl_mean_weight(beta(i));
    kernel(i) = std::abs(beta(i)) <= 1e-12 ? 1.0 : 0.0;
    q_diag(i) = mean_weight(i) - 2.0 * kernel(i);
    mean_term += mean_weight(i) * dm(i) * dm(i);
  }

  DivergenceResult r;
  r.value = 0.25 * kappa * cov_term + 0.25 * mean_term;
  const Matrix& v = eig.vectors;
  r.diagnostics["R"] = transport;
  r.diagnostics["B"] = symmetrize(v * beta.asDiagonal() * v.transpose());
  r.diagnostics["Q"] = symmetrize(v * q_diag.asDiagonal() * v.transpose());
  r.diagnostics["logR_perp"] = symmetrize(v * kernel.asDiagonal() * v.transpose());
  return finalize(std::move(r));
}

DivergenceResult wkl_commuting(const EllipticDist& mu0, const EllipticDist& mu1) {
  require_same_shape(mu0, mu1);
  // Evaluates κ/4‖√Q(√Σ1 − √Σ0)‖² + ¼‖√(Q + 2log(R)^⊥)Δm‖² in the shared eigenbasis, R = √(Σ1Σ0⁻¹).
  const Matrix basis = linalg::shared_eigenbasis({&mu0.scale.matrix(), &mu1.scale.matrix()});
  const Vector s0 = linalg::diagonal_in_basis(basis, mu0.scale.matrix());
  const Vector s1 = linalg::diagonal_in_basis(basis, mu1.scale.matrix());
  const Vector dm = basis.transpose() * (mu1.mean - mu0.mean);
  const Index d = mu0.dim();

  Vector r_diag(d), q_diag(d), kernel(d);
  double cov_term = 0.0, mean_term = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double beta = 0.5 * std::log(s1(i) / s0(i));
    r_diag(i) = std::sqrt(s1(i) / s0(i));
    kernel(i) = std::abs(beta) <= 1e-12 ? 1.0 : 0.0;
    q_diag(i) = wkl_mean_weight(beta) - 2.0 * kernel(i);
    const double root_gap = (s1(i) - s0(i)) / (std::sqrt(s1(i)) + std::sqrt(s0(i)));
    cov_term += q_diag(i) * root_gap * root_gap;
    mean_term += (q_diag(i) + 2.0 * kernel(i)) * dm(i) * dm(i);
  }

  DivergenceResult r;
  r.value = 0.25 * mu0.kappa() * cov_term + 0.25 * mean_term;
  r.diagnostics["R"] = symmetrize(basis * r_diag.asDiagonal() * basis.transpose());
  r.diagnostics["Q"] = symmetrize(basis * q_diag.asDiagonal() * basis.transpose());
  r.diagnostics["logR_perp"] = symmetrize(basis * kernel.asDiagonal() * basis.transpose());
  return finalize(std::move(r));
}

DivergenceResult kwkl(const EllipticDist& mu0, const EllipticDist& mu1, double lambda) {
  require_same_shape(mu0, mu1);
  require_positive(lambda, "lambda");
  const double kappa = mu0.kappa();
  const Matrix basis = linalg::shared_eigenbasis({&mu0.scale.matrix(), &mu1.scale.matrix()});
  const Vector s0 = linalg::diagonal_in_basis(basis, mu0.scale.matrix());
  const Vector s1 = linalg::diagonal_in_basis(basis, mu1.scale.matrix());
  const Vector dm = basis.transpose() * (mu1.mean - mu0.mean);
  const Index d = mu0.dim();

  DivergenceResult r;
  Vector beta = Vector::Zero(d), xi = Vector::Zero(d), moving = Vector::Zero(d);
  double value = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double a = s0(i);
    const double c = s1(i);
    const double ds = c - a;
    if (std::abs(ds) <= 1e-12 * std::max(a, c)) {
      value += 0.5 * dm(i) * dm(i) / (kappa * a + lambda);
      continue;
    }
    moving(i) = 1.0;
    beta(i) = std::log((lambda / a + kappa) / (lambda / c + kappa)) / (2.0 * lambda);
    if (ds > 0.0 && lambda >= kappa * a * c / ds) {
      std::ostringstream os;
      os << "component " << i << ": lambda " << lambda << " exceeds the bound " << kappa * a * c / ds;
      r.warnings.push_back(os.str());
    }
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      const double xi_t = (kappa * a + lambda) * std::exp(-2.0 * lambda * beta(i) * t) - kappa * a;
      if (!(xi_t > 0.0) || !std::isfinite(xi_t)) {
        throw Error(ErrorCode::GeodesicBlowup, "scale component leaves (0, inf) before t = 1");
      }
    }
    // κ s1 ln(s1/s0) + (κ s1 + λ) ln((λ + κ s0)/(λ + κ s1)), rearranged so the
    // first-order terms cancel analytically.
    const double u = ds / a;
    const double v = kappa * ds / (lambda + kappa * a);
    const double h = kappa * lambda * ds * ds / (a * (lambda + kappa * a)) + kappa * c * detail::log1p_minus_x(u) -
                     (kappa * c + lambda) * detail::log1p_minus_x(v);
    const double root_sum = std::sqrt(a) + std::sqrt(c);
    const double mean_factor = dm(i) * dm(i) * root_sum * root_sum / (kappa * ds * ds);
    value += (h + h * mean_factor) / (4.0 * lambda);
    xi(i) = h / kappa;
  }
  r.value = value;
  r.diagnostics["basis"] = basis;
  r.diagnostics["s0"] = column(s0);
  r.diagnostics["s1"] = column(s1);
  r.diagnostics["beta"] = column(beta);
  r.diagnostics["Xi"] = symmetrize(basis * xi.asDiagonal() * basis.transpose());
  r.diagnostics["P"] = symmetrize(basis * moving.asDiagonal() * basis.transpose());
  return finalize(std::move(r));
}

DivergenceResult kw_same_variance(const Vector& m0, const Vector& m1, const SpdMatrix& scale, double kappa,
                                  double lambda) {
  if (m0.size() != scale.dim() || m1.size() != scale.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "means and scale differ in dimension");
  }
  require_positive(kappa, "kappa");
  require_positive(lambda, "lambda");
  const Index d = scale.dim();
  const Matrix inflated = kappa * scale.matrix() + lambda * Matrix::Identity(d, d);
  const Vector dm = m1 - m0;
  DivergenceResult r;
  r.value = 0.5 * dm.dot(Eigen::LLT<Matrix>(inflated).solve(dm));
  return finalize(std::move(r));
}

DivergenceResult stein_bilinear(const SpdMatrix& scale0, const SpdMatrix& scale1, const SpdMatrix& kernel) {
  if (scale0.dim() != scale1.dim() || scale0.dim() != kernel.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "Stein operands differ in dimension");
  }
  if (!scale0.is_strict() || !scale1.is_strict() || !kernel.is_strict()) {
    throw Error(ErrorCode::DegenerateCovariance, "Stein operands must be positive definite");
  }
  const Matrix basis = linalg::shared_eigenbasis({&scale0.matrix(), &scale1.matrix(), &kernel.matrix()});
  const Vector s0 = linalg::diagonal_in_basis(basis, scale0.matrix());
  const Vector s1 = linalg::diagonal_in_basis(basis, scale1.matrix());
  const Vector a = linalg::diagonal_in_basis(basis, kernel.matrix());
  DivergenceResult r;
  for (Index i = 0; i < s0.size(); ++i) {
    // r − 1 − ln r with r = s1/s0
    r.value += -detail::log1p_minus_x((s1(i) - s0(i)) / s0(i)) / (4.0 * a(i));
  }
  r.diagnostics["basis"] = basis;
  return finalize(std::move(r));
}

DivergenceResult coulomb_1d(const EllipticDist& mu0, const EllipticDist& mu1) {
  if (mu0.dim() != 1 || mu1.dim() != 1) {
    throw Error(ErrorCode::UnsupportedDimension, "Coulomb MMD closed form is implemented for d = 1 only");
  }
  if (!mu0.family.is_gaussian() || !mu1.family.is_gaussian()) {
    throw Error(ErrorCode::FamilyMismatch, "Coulomb MMD closed form requires Gaussian distributions");
  }
  const double v0 = mu0.scale.matrix()(0, 0);
  const double v1 = mu1.scale.matrix()(0, 0);
  const double cross = detail::folded_normal_mean(mu0.mean(0) - mu1.mean(0), std::sqrt(v0 + v1));
  const double self0 = detail::folded_normal_mean(0.0, std::sqrt(2.0 * v0));
  const double self1 = detail::folded_normal_mean(0.0, std::sqrt(2.0 * v1));
  // (3/2)·∬ −½|x − y| d(μ−ν)(x) d(μ−ν)(y)
  DivergenceResult r;
  r.value = 0.75 * (2.0 * cross - self0 - self1);
  return finalize(std::move(r));
}

}  // namespace statediv
