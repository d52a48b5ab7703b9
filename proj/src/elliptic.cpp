#include "statediv/elliptic.hpp"

#include <cmath>
#include <sstream>

namespace statediv {

EllipticFamily EllipticFamily::student_t(double dof) {
  if (!(dof > 2.0) || !std::isfinite(dof)) {
    throw Error(ErrorCode::InvalidFamily, "Student-t needs more than 2 degrees of freedom");
  }
  return EllipticFamily(Kind::StudentT, dof);
}

EllipticFamily EllipticFamily::custom_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::InvalidFamily, "kappa must be positive");
  }
  return EllipticFamily(Kind::CustomKappa, kappa);
}

std::string EllipticFamily::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Gaussian: os << "gaussian"; break;
    case Kind::StudentT: os << "student:" << parameter_; break;
    case Kind::CustomKappa: os << "kappa:" << parameter_; break;
  }
  return os.str();
}

double kappa(const EllipticFamily& family) {
  switch (family.kind()) {
    case EllipticFamily::Kind::Gaussian: return 1.0;
    case EllipticFamily::Kind::StudentT: return family.parameter() / (family.parameter() - 2.0);
    case EllipticFamily::Kind::CustomKappa: return family.parameter();
  }
  throw Error(ErrorCode::InvalidFamily, "unknown family");
}

EllipticDist::EllipticDist(Vector m, SpdMatrix s, EllipticFamily f)
    : mean(std::move(m)), scale(std::move(s)), family(f) {
  if (mean.size() != scale.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "mean and scale dimensions differ");
  }
  if (!mean.allFinite()) throw Error(ErrorCode::NonFinite, "mean has non-finite entries");
}

QuadraticPotential::QuadraticPotential(const Matrix& quadratic, Vector linear, double constant)
    : B(linalg::symmetrize(quadratic)), b(std::move(linear)), c(constant) {
  if (quadratic.rows() != quadratic.cols() || quadratic.rows() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "potential has inconsistent dimensions");
  }
  if (!linalg::is_symmetric(quadratic)) {
    throw Error(ErrorCode::InvalidArgument, "quadratic part of a potential must be symmetric");
  }
}

SpdMatrix covariance(const EllipticDist& d) { return SpdMatrix(d.kappa() * d.scale.matrix()); }

EllipticDist affine_pushforward(const EllipticDist& d, const Matrix& a, const Vector& shift) {
  if (a.rows() != d.dim() || a.cols() != d.dim() || shift.size() != d.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "affine map does not match the distribution");
  }
  const Matrix pushed = linalg::symmetrize(a * d.scale.matrix() * a.transpose());
  try {
    return EllipticDist(a * d.mean + shift, SpdMatrix(pushed), d.family);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotSpd) throw Error(ErrorCode::DegenerateScale, "pushed scale AΣAᵀ lost rank");
    throw;
  }
}

double expect_quadratic(const EllipticDist& d, const QuadraticPotential& f) {
  if (f.dim() != d.dim()) throw Error(ErrorCode::DimensionMismatch, "potential and distribution differ in size");
  const Vector& m = d.mean;
  return 0.5 * d.kappa() * (f.B * d.scale.matrix()).trace() + 0.5 * m.dot(f.B * m) + f.b.dot(m) + f.c;
}

QuadraticPotential compose_affine(const QuadraticPotential& f, const Matrix& a, const Vector& shift) {
  if (a.rows() != f.dim() || shift.size() != f.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "affine map does not match the potential");
  }
  const Matrix quad = a.transpose() * f.B * a;
  const Vector lin = a.transpose() * (f.B * shift + f.b);
  const double constant = 0.5 * shift.dot(f.B * shift) + f.b.dot(shift) + f.c;
  return QuadraticPotential(linalg::symmetrize(quad), lin, constant);
}

}  // namespace statediv
