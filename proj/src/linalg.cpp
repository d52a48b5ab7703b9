#include "statediv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace statediv::linalg {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

void require_square(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.transpose()) <= rel_tol * std::max(1.0, max_abs(m));
}

SymmetricEigen eig_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFinite, "symmetric eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SpdMatrix::SpdMatrix(const Matrix& m, Definiteness definiteness) : definiteness_(definiteness) {
  require_square(m, "SPD matrix");
  require_finite(m, "SPD matrix");
  if (!is_symmetric(m)) throw Error(ErrorCode::NotSpd, "matrix is not symmetric");
  m_ = symmetrize(m);
  const Vector ev = eig_sym(m_).values;
  min_eig_ = ev(0);
  max_eig_ = ev(ev.size() - 1);
  if (definiteness_ == Definiteness::Positive) {
    if (!(min_eig_ > 0.0)) {
      throw Error(ErrorCode::NotSpd, "smallest eigenvalue " + std::to_string(min_eig_) + " is not positive");
    }
  } else if (min_eig_ < -1e-12 * std::max(1.0, std::abs(max_eig_))) {
    throw Error(ErrorCode::NotSpd, "smallest eigenvalue " + std::to_string(min_eig_) + " is negative");
  }
}

Matrix SpdMatrix::inverse() const {
  if (!is_strict()) throw Error(ErrorCode::NotSpd, "inverse of a semi-definite matrix");
  Eigen::LLT<Matrix> llt(m_);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "Cholesky factorization failed");
  return symmetrize(llt.solve(Matrix::Identity(dim(), dim())));
}

SpdMatrix sqrtm_spd(const SpdMatrix& m) {
  const Matrix root = spectral_apply(eig_sym(m.matrix()), [](double x) { return std::sqrt(std::max(x, 0.0)); });
  return SpdMatrix(root, m.definiteness());
}

Matrix inv_sqrtm_spd(const SpdMatrix& m) {
  if (!m.is_strict()) throw Error(ErrorCode::NotSpd, "inverse square root of a semi-definite matrix");
  return spectral_apply(eig_sym(m.matrix()), [](double x) { return 1.0 / std::sqrt(x); });
}

Matrix logm_spd(const SpdMatrix& m) {
  if (!m.is_strict()) throw Error(ErrorCode::NonPositiveSpectrum, "logarithm of a singular matrix");
  return spectral_apply(eig_sym(m.matrix()), [](double x) { return std::log(x); });
}

Matrix logm_pos(const Matrix& m) {
  require_square(m, "logm argument");
  require_finite(m, "logm argument");
  if (is_symmetric(m, 1e-14)) {
    const SymmetricEigen e = eig_sym(m);
    if (!(e.values(0) > 0.0)) throw Error(ErrorCode::NonPositiveSpectrum, "eigenvalue ≤ 0");
    return spectral_apply(e, [](double x) { return std::log(x); });
  }
  Eigen::EigenSolver<Matrix> solver(m, true);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonPositiveSpectrum, "eigendecomposition failed");
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  Vector log_values(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    const std::complex<double> z = lambda(i);
    if (std::abs(z.imag()) > 1e-10 * std::abs(z) || !(z.real() > 0.0)) {
      throw Error(ErrorCode::NonPositiveSpectrum, "eigenvalue is not real positive");
    }
    log_values(i) = std::log(z.real());
  }
  const Matrix v = vectors.real();
  Eigen::JacobiSVD<Matrix> svd(v);
  const Vector sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    throw Error(ErrorCode::NonPositiveSpectrum, "matrix is not diagonalizable");
  }
  return v * log_values.asDiagonal() * v.inverse();
}

Matrix log_spd_ratio(const SpdMatrix& numer, const SpdMatrix& denom) {
  if (numer.dim() != denom.dim()) throw Error(ErrorCode::DimensionMismatch, "log ratio operands differ in size");
  const SpdMatrix root = sqrtm_spd(denom);
  const Matrix inv_root = inv_sqrtm_spd(denom);
  const SpdMatrix whitened(symmetrize(inv_root * numer.matrix() * inv_root));
  return root.matrix() * logm_spd(whitened) * inv_root;
}

Matrix expm(const Matrix& m) {
  require_square(m, "expm argument");
  require_finite(m, "expm argument");
  return m.exp();
}

Matrix expm_sym(const Matrix& m) {
  require_square(m, "expm argument");
  return spectral_apply(eig_sym(m), [](double x) { return std::exp(x); });
}

Matrix pinv(const Matrix& m, std::optional<double> rank_tol) {
  require_finite(m, "pinv argument");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double tol = rank_tol.value_or(1e-12 * sigma_max);
  Vector inv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  }
  const Index k = sv.size();
  return svd.matrixV().leftCols(k) * inv.asDiagonal() * svd.matrixU().leftCols(k).transpose();
}

Matrix kernel_projector(const Matrix& m, std::optional<double> rank_tol) {
  require_square(m, "kernel projector argument");
  return Matrix::Identity(m.rows(), m.cols()) - m * pinv(m, rank_tol);
}

double spectral_radius(const Matrix& m) {
  require_square(m, "spectral radius argument");
  require_finite(m, "spectral radius argument");
  Eigen::EigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonFinite, "eigenvalue computation failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double relative_commutator(const Matrix& a, const Matrix& b) {
  const double scale = a.norm() * b.norm();
  if (scale == 0.0) return 0.0;
  return (a * b - b * a).norm() / scale;
}

Matrix shared_eigenbasis(std::initializer_list<const Matrix*> matrices) {
  if (matrices.size() == 0) throw Error(ErrorCode::InvalidArgument, "no matrices given");
  const Index n = (*matrices.begin())->rows();
  // Irrational weights split eigenspaces that are degenerate for one input
  // but not for another.
  static constexpr double kWeights[] = {1.0, 0.41421356237309515, 0.14159265358979312, 0.0716737};
  Matrix combo = Matrix::Zero(n, n);
  std::size_t k = 0;
  for (const Matrix* m : matrices) {
    require_square(*m, "commuting operand");
    if (m->rows() != n) throw Error(ErrorCode::DimensionMismatch, "commuting operands differ in size");
    const double norm = m->norm();
    if (norm > 0.0) combo += kWeights[k % 4] * (*m) / norm;
    ++k;
  }
  const Matrix q = eig_sym(combo).vectors;
  for (const Matrix* m : matrices) {
    for (const Matrix* other : matrices) {
      if (relative_commutator(*m, *other) > kCommuteTol) {
        throw Error(ErrorCode::NonCommutingScales, "inputs do not commute");
      }
    }
    Matrix d = q.transpose() * (*m) * q;
    const double scale = std::max(max_abs(*m), 1e-300);
    d.diagonal().setZero();
    if (max_abs(d) > kCommuteTol * scale) {
      throw Error(ErrorCode::NonCommutingScales, "inputs are not simultaneously diagonalizable");
    }
  }
  return q;
}

Vector diagonal_in_basis(const Matrix& q, const Matrix& m) {
  return (q.transpose() * m * q).diagonal();
}

}  // namespace statediv::linalg
