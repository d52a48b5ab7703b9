#include "statediv/lqr.hpp"

#include <cmath>

#include "statediv/numfmt.hpp"

namespace statediv {

namespace {

using linalg::symmetrize;

double sup_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "discount must lie in (0, 1)");
}

void check_shapes(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r) {
  linalg::require_square(a, "A");
  if (b.rows() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "B must have as many rows as A");
  if (q.rows() != a.rows() || q.cols() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "Q must match A");
  if (r.rows() != b.cols() || r.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "R must be m×m");
}

// One application of the γ-scaled Riccati map.
Matrix riccati_map(const Matrix& a_g, const Matrix& b, const Matrix& q, const Matrix& r_g, const Matrix& p) {
  const Matrix pb = p * b;
  const Matrix inner = symmetrize(b.transpose() * pb + r_g);
  const Matrix bpa = pb.transpose() * a_g;
  Eigen::LDLT<Matrix> ldlt(inner);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "BᵀPB + R/γ is singular");
  return symmetrize(q + a_g.transpose() * p * a_g - bpa.transpose() * ldlt.solve(bpa));
}

}  // namespace

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix noise_cov) : A(std::move(a)), B(std::move(b)), noise_cov(std::move(noise_cov)) {
  linalg::require_square(A, "A");
  if (B.rows() != A.rows()) throw Error(ErrorCode::DimensionMismatch, "B must have as many rows as A");
  if (this->noise_cov.rows() != A.rows() || this->noise_cov.cols() != A.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "noise covariance must be n×n");
  }
  linalg::require_finite(A, "A");
  linalg::require_finite(B, "B");
  this->noise_cov = SpdMatrix::psd(this->noise_cov).matrix();
}

std::string Regularizer::label() const {
  switch (kind) {
    case RegularizerKind::Kl: return "KL";
    case RegularizerKind::Wkl: return "WKL";
    case RegularizerKind::Kw: return "KW(" + format_double(lambda) + ")";
  }
  return "?";
}

Regularizer parse_regularizer(const std::string& text) {
  if (text == "kl" || text == "KL") return Regularizer::kl();
  if (text == "wkl" || text == "WKL") return Regularizer::wkl();
  if (text.rfind("kw:", 0) == 0 || text.rfind("KW:", 0) == 0) {
    double lambda = 0.0;
    try {
      std::size_t used = 0;
      lambda = std::stod(text.substr(3), &used);
      if (used != text.size() - 3) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad KW weight in '" + text + "'");
    }
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "KW weight must be positive");
    return Regularizer::kw(lambda);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown regularizer '" + text + "' (expected kl, wkl or kw:<lambda>)");
}

PenaltyResult effective_penalty(const Regularizer& reg, const Matrix& b, const Matrix& noise_cov) {
  const Index n = b.rows();
  if (noise_cov.rows() != n || noise_cov.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "noise covariance must match the rows of B");
  }
  linalg::require_finite(b, "B");
  Eigen::ColPivHouseholderQR<Matrix> qr(b);
  qr.setThreshold(1e-12);
  if (b.cols() == 0 || qr.rank() < b.cols()) throw Error(ErrorCode::RankDeficientB, "B must have full column rank");

  PenaltyResult out{SpdMatrix::identity(b.cols()), {}};
  switch (reg.kind) {
    case RegularizerKind::Wkl:
      out.R = SpdMatrix(symmetrize(b.transpose() * b));
      break;
    case RegularizerKind::Kl: {
      const linalg::SymmetricEigen e = linalg::eig_sym(symmetrize(noise_cov));
      const double lo = e.values(0), hi = e.values(e.values.size() - 1);
      if (!(lo > 0.0) || lo <= 1e-15 * hi) throw Error(ErrorCode::SingularNoise, "KL penalty needs a nonsingular Σw");
      if (hi / lo > 1e12) out.warnings.push_back("Σw condition number " + format_double(hi / lo) + " exceeds 1e12");
      const Matrix inv = e.vectors * e.values.cwiseInverse().asDiagonal() * e.vectors.transpose();
      out.R = SpdMatrix(symmetrize(b.transpose() * inv * b));
      break;
    }
    case RegularizerKind::Kw: {
      if (!(reg.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "KW weight must be positive");
      const Matrix shifted = symmetrize(noise_cov + reg.lambda * Matrix::Identity(n, n));
      Eigen::LLT<Matrix> llt(shifted);
      if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "Σw + λI is not positive definite");
      out.R = SpdMatrix(symmetrize(b.transpose() * llt.solve(b)));
      break;
    }
  }
  return out;
}

DareResult solve_dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, double gamma,
                      const DareOptions& options) {
  check_shapes(a, b, q, r);
  check_gamma(gamma);
  if (!(options.tol > 0.0) || options.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "bad DARE options");
  static_cast<void>(SpdMatrix::psd(q));
  static_cast<void>(SpdMatrix(r));

  const Matrix a_g = std::sqrt(gamma) * a;
  const Matrix r_g = r / gamma;
  Matrix p = options.initial.value_or(q);
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error(ErrorCode::DimensionMismatch, "P₀ must match Q");

  for (long k = 1; k <= options.max_iter; ++k) {
    Matrix next = riccati_map(a_g, b, q, r_g, p);
    if (!next.allFinite()) throw Error(ErrorCode::NoConvergence, "Riccati iterates diverged");
    const double step = sup_norm(next - p);
    p = std::move(next);
    if (step <= options.tol * std::max(1.0, sup_norm(p))) {
      return DareResult{p, k, riccati_residual(a, b, q, r, gamma, p)};
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "Riccati iteration did not converge in " + std::to_string(options.max_iter) + " steps");
}

double riccati_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, double gamma,
                        const Matrix& p) {
  check_shapes(a, b, q, r);
  return sup_norm(riccati_map(std::sqrt(gamma) * a, b, q, r / gamma, p) - p);
}

Matrix optimal_gain(const Matrix& a, const Matrix& b, const Matrix& p, const Matrix& r, double gamma) {
  const Matrix inner = symmetrize(r + gamma * b.transpose() * p * b);
  Eigen::LDLT<Matrix> ldlt(inner);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "R + γBᵀPB is singular");
  return -gamma * ldlt.solve(b.transpose() * p * a);
}

double optimal_cost(const Matrix& p, const Vector& mu0, const Matrix& sigma0, const Matrix& noise_cov, double gamma,
                    CostConvention convention) {
  const Index n = p.rows();
  if (mu0.size() != n || sigma0.rows() != n || noise_cov.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch, "cost operands differ in dimension");
  }
  check_gamma(gamma);
  const double half = 0.5 * (mu0.dot(p * mu0) + (p * sigma0).trace()) +
                      gamma / (2.0 * (1.0 - gamma)) * (p * noise_cov).trace();
  return convention == CostConvention::Unit ? 2.0 * half : half;
}

double closed_loop_radius(const Matrix& a, const Matrix& b, const Matrix& f) {
  if (f.rows() != b.cols() || f.cols() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "F must be m×n");
  return linalg::spectral_radius(a + b * f);
}

LqrSolution solve_regularized(const LqrProblem& problem) {
  const LtiSystem& sys = problem.system;
  check_gamma(problem.gamma);
  PenaltyResult penalty = effective_penalty(problem.regularizer, sys.B, sys.noise_cov);
  const Matrix& r = penalty.R.matrix();
  const DareResult dare = solve_dare(sys.A, sys.B, problem.Q, r, problem.gamma, problem.options);

  LqrSolution sol;
  sol.P = dare.P;
  sol.R_eff = r;
  sol.iterations = dare.iterations;
  sol.warnings = std::move(penalty.warnings);
  sol.F = optimal_gain(sys.A, sys.B, sol.P, r, problem.gamma);
  sol.closed_loop_radius = closed_loop_radius(sys.A, sys.B, sol.F);
  sol.cost = optimal_cost(sol.P, problem.mu0, problem.sigma0, sys.noise_cov, problem.gamma, problem.cost_convention);
  if (!(std::sqrt(problem.gamma) * sol.closed_loop_radius < 1.0)) {
    throw Error(ErrorCode::UnstableClosedLoop, "√γ·ρ(A + BF) = " +
                                                   format_double(std::sqrt(problem.gamma) * sol.closed_loop_radius) +
                                                   " is not below 1");
  }
  return sol;
}

}  // namespace statediv
