#pragma once

// Dense matrix functions shared by every other module: SPD square roots,
// principal logarithms, exponentials, pseudo-inverses and spectral radii.
// Everything here is a pure function of its arguments.

#include <initializer_list>
#include <optional>

#include <Eigen/Dense>

#include "statediv/error.hpp"

namespace statediv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Relative symmetry tolerance used by every SPD check.
inline constexpr double kSymmetryTol = 1e-10;
/// Relative commutation tolerance for "simultaneously diagonalizable" inputs.
inline constexpr double kCommuteTol = 1e-9;

enum class Definiteness { Positive, SemiDefinite };

/// Symmetric positive (semi-)definite matrix. The stored matrix is always
/// exactly symmetric; construction throws NotSpd when the input is not
/// symmetric within kSymmetryTol or its spectrum violates the definiteness.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m, Definiteness definiteness = Definiteness::Positive);

  static SpdMatrix identity(Index n) { return SpdMatrix(Matrix::Identity(n, n)); }
  static SpdMatrix psd(const Matrix& m) { return SpdMatrix(m, Definiteness::SemiDefinite); }

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  Definiteness definiteness() const noexcept { return definiteness_; }
  bool is_strict() const noexcept { return definiteness_ == Definiteness::Positive; }

  double min_eigenvalue() const noexcept { return min_eig_; }
  double max_eigenvalue() const noexcept { return max_eig_; }

  /// Inverse via Cholesky. Throws NotSpd for a semi-definite matrix.
  Matrix inverse() const;

  operator const Matrix&() const noexcept { return m_; }

 private:
  Matrix m_;
  Definiteness definiteness_;
  double min_eig_ = 0.0;
  double max_eig_ = 0.0;
};

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

void require_square(const Matrix& m, const char* what);
void require_finite(const Matrix& m, const char* what);

Matrix symmetrize(const Matrix& m);
bool is_symmetric(const Matrix& m, double rel_tol = kSymmetryTol);

SymmetricEigen eig_sym(const Matrix& m);

/// V·diag(f(λ))·Vᵀ for a symmetric eigendecomposition.
template <typename F>
Matrix spectral_apply(const SymmetricEigen& e, F&& f) {
  Vector mapped(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i) mapped(i) = f(e.values(i));
  return symmetrize(e.vectors * mapped.asDiagonal() * e.vectors.transpose());
}

SpdMatrix sqrtm_spd(const SpdMatrix& m);
Matrix inv_sqrtm_spd(const SpdMatrix& m);

/// Principal logarithm of a symmetric positive definite matrix.
Matrix logm_spd(const SpdMatrix& m);

/// Principal logarithm of a diagonalizable matrix with positive real
/// spectrum. Throws NonPositiveSpectrum otherwise.
Matrix logm_pos(const Matrix& m);

/// log(numer · denom⁻¹) through the congruence
/// denom^{1/2} · log(denom^{-1/2} numer denom^{-1/2}) · denom^{-1/2}.
Matrix log_spd_ratio(const SpdMatrix& numer, const SpdMatrix& denom);

Matrix expm(const Matrix& m);
/// exp of a symmetric matrix via its eigendecomposition.
Matrix expm_sym(const Matrix& m);

/// Moore–Penrose pseudo-inverse. Singular values ≤ rank_tol are dropped;
/// the default tolerance is 1e-12·σ_max.
Matrix pinv(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

/// Orthogonal projector onto ker(m): I − m·m†.
Matrix kernel_projector(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

double spectral_radius(const Matrix& m);

/// ‖ab − ba‖_F / (‖a‖_F‖b‖_F); zero when either factor is zero.
double relative_commutator(const Matrix& a, const Matrix& b);

/// Orthogonal matrix diagonalizing every (pairwise commuting, symmetric)
/// input. Throws NonCommutingScales if some input is not diagonal in the
/// basis within kCommuteTol.
Matrix shared_eigenbasis(std::initializer_list<const Matrix*> matrices);

/// diag(Qᵀ m Q).
Vector diagonal_in_basis(const Matrix& q, const Matrix& m);

}  // namespace linalg

using linalg::SpdMatrix;

}  // namespace statediv
