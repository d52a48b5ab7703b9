#pragma once

// Discounted infinite-horizon LQR with divergence-regularized input cost.
// The penalty matrix R is induced by the chosen divergence between the
// controlled and uncontrolled next-state laws.

#include <optional>
#include <string>
#include <vector>

#include "statediv/linalg.hpp"

namespace statediv {

/// x_{t+1} = A x_t + B u_t + w_t with w_t ~ N(0, Σw).
struct LtiSystem {
  LtiSystem(Matrix a, Matrix b, Matrix noise_cov);

  Index state_dim() const noexcept { return A.rows(); }
  Index input_dim() const noexcept { return B.cols(); }

  Matrix A;
  Matrix B;
  Matrix noise_cov;
};

enum class RegularizerKind { Kl, Wkl, Kw };

struct Regularizer {
  RegularizerKind kind = RegularizerKind::Wkl;
  double lambda = 0.0;  // KW only

  static Regularizer kl() { return {RegularizerKind::Kl, 0.0}; }
  static Regularizer wkl() { return {RegularizerKind::Wkl, 0.0}; }
  static Regularizer kw(double lambda) { return {RegularizerKind::Kw, lambda}; }

  /// "KL", "WKL", "KW(0.01)" (shortest round-trip for λ).
  std::string label() const;
};

/// Parses "kl", "wkl", "kw:<lambda>".
Regularizer parse_regularizer(const std::string& text);

struct PenaltyResult {
  SpdMatrix R;
  std::vector<std::string> warnings;
};

/// R_KL = BᵀΣw⁻¹B, R_WKL = BᵀB, R_KW = Bᵀ(Σw + λI)⁻¹B.
PenaltyResult effective_penalty(const Regularizer& reg, const Matrix& b, const Matrix& noise_cov);

struct DareOptions {
  double tol = 1e-12;
  long max_iter = 1'000'000;
  std::optional<Matrix> initial;  // P₀, defaults to Q
};

struct DareResult {
  Matrix P;
  long iterations = 0;
  double residual = 0.0;
};

/// Value iteration on P ↦ Q + AγᵀPAγ − AγᵀPB(BᵀPB + Rγ)⁻¹BᵀPAγ with Aγ = √γA, Rγ = R/γ.
/// Stops once the sup-norm step falls below tol·max(1, max|P|).
DareResult solve_dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, double gamma,
                      const DareOptions& options = {});

/// Sup-norm of the discounted Riccati equation evaluated at P.
double riccati_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, double gamma,
                        const Matrix& p);

/// F = −γ(R + γBᵀPB)⁻¹BᵀPA.
Matrix optimal_gain(const Matrix& a, const Matrix& b, const Matrix& p, const Matrix& r, double gamma);

/// Half: stage cost ½(xᵀQx + uᵀRu). Unit: stage cost xᵀQx + uᵀRu (twice Half).
enum class CostConvention { Half, Unit };

/// ½(μ0ᵀPμ0 + tr(PΣ0)) + γ/(2(1−γ))·tr(PΣw), doubled under Unit.
double optimal_cost(const Matrix& p, const Vector& mu0, const Matrix& sigma0, const Matrix& noise_cov, double gamma,
                    CostConvention convention = CostConvention::Half);

double closed_loop_radius(const Matrix& a, const Matrix& b, const Matrix& f);

struct LqrProblem {
  LtiSystem system;
  Matrix Q;
  double gamma = 0.9;
  Regularizer regularizer;
  Vector mu0;
  Matrix sigma0;
  CostConvention cost_convention = CostConvention::Half;
  DareOptions options;
};

struct LqrSolution {
  Matrix P;
  Matrix F;
  Matrix R_eff;
  double cost = 0.0;
  double closed_loop_radius = 0.0;
  long iterations = 0;
  std::vector<std::string> warnings;
};

LqrSolution solve_regularized(const LqrProblem& problem);

}  // namespace statediv
