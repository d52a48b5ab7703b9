#include "statediv/prng.hpp"

#include <cmath>
#include <numbers>

namespace statediv {

double GaussianNoise::uniform() {
  const std::uint64_t x = engine_();
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianNoise::standard_normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Vector GaussianNoise::standard_normal(Index n) {
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = standard_normal();
  return z;
}

Vector GaussianNoise::sample(const Matrix& factor) { return factor * standard_normal(factor.cols()); }

Matrix noise_factor(const Matrix& cov) {
  const SpdMatrix psd = SpdMatrix::psd(cov);
  if (psd.max_eigenvalue() == 0.0) return Matrix::Zero(cov.rows(), cov.cols());
  if (psd.min_eigenvalue() > 0.0) {
    Eigen::LLT<Matrix> llt(psd.matrix());
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  return linalg::sqrtm_spd(psd).matrix();
}

}  // namespace statediv
