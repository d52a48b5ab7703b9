#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "random.hpp"
#include "statediv/divergences.hpp"
#include "statediv/prng.hpp"

using namespace statediv;
using testsupport::Rng;

namespace {

EllipticDist gauss1(double m, double var) {
  return EllipticDist::gaussian(Vector::Constant(1, m), Matrix::Constant(1, 1, var));
}

// Textbook WKL evaluation straight from the matrix expressions, pseudo-inverses included.
double wkl_literal(const EllipticDist& mu0, const EllipticDist& mu1) {
  const Index d = mu0.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix root0 = linalg::sqrtm_spd(mu0.scale).matrix();
  const Matrix inv_root0 = root0.inverse();
  const Matrix mid = linalg::sqrtm_spd(SpdMatrix(linalg::symmetrize(root0 * mu1.scale.matrix() * root0))).matrix();
  const Matrix r = linalg::symmetrize(inv_root0 * mid * inv_root0);
  const Matrix r2 = r * r;
  const Matrix log_r = linalg::logm_pos(r);
  const Matrix log_r2 = linalg::logm_pos(r2);
  const Matrix p = linalg::pinv(r - id, 1e-9);
  const Matrix q = p * (log_r2 * r2 - r2 + id) * p;
  const Matrix perp = linalg::kernel_projector(log_r, 1e-9);
  const Vector dm = mu1.mean - mu0.mean;
  const Matrix& s0 = mu0.scale.matrix();
  return 0.25 * dm.dot((q + 2 * perp) * dm) + mu0.kappa() / 4 * (s0 - mu1.scale.matrix() + s0 * r2 * log_r2).trace();
}

// Piecewise integration over x of the componentwise KW energy is done in the
// geodesics tests; here the plain KL of λ-inflated Gaussians serves as reference.
double kl_inflated(const Vector& m0, const Vector& m1, const Matrix& s, double lambda) {
  const Matrix inflated = s + lambda * Matrix::Identity(s.rows(), s.cols());
  return kl_gaussian(EllipticDist::gaussian(m0, inflated), EllipticDist::gaussian(m1, inflated)).value;
}

}  // namespace

TEST(Kl, Examples) {
  EXPECT_DOUBLE_EQ(kl_gaussian(gauss1(0, 1), gauss1(1, 1)).value, 0.5);
  EXPECT_DOUBLE_EQ(kl_gaussian(gauss1(0.5, 1), gauss1(0, 1)).value, 0.125);
  Rng rng(31);
  const EllipticDist mu = EllipticDist::gaussian(rng.vector(3), rng.spd(3));
  EXPECT_EQ(kl_gaussian(mu, mu).value, 0.0);
}

TEST(Kl, RejectsNonGaussian) {
  const EllipticDist t(Vector::Zero(1), SpdMatrix::identity(1), EllipticFamily::student_t(4));
  try {
    kl_gaussian(t, t);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FamilyMismatch);
  }
}

TEST(Wkl, Examples) {
  EXPECT_LE(wkl(gauss1(0.3, 2), gauss1(0.3, 2)).value, 1e-15);
  EXPECT_NEAR(wkl(gauss1(0, 1), gauss1(0.5, 1)).value, 0.125, 1e-15);
  const double e2 = std::exp(2.0);
  EXPECT_NEAR(wkl(gauss1(0, 1), gauss1(0, e2)).value, 0.25 * (1 + e2), 1e-13);
}

TEST(Wkl, MatchesLiteralMatrixFormula) {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = rng.integer(1, 4);
    const EllipticFamily fam = trial % 2 ? EllipticFamily::gaussian() : EllipticFamily::student_t(5);
    const EllipticDist mu0(rng.vector(d), SpdMatrix(rng.spd(d)), fam);
    const EllipticDist mu1(rng.vector(d), SpdMatrix(rng.spd(d)), fam);
    const double lit = wkl_literal(mu0, mu1);
    EXPECT_LT(testsupport::rel_diff(wkl(mu0, mu1).value, lit), 1e-9) << trial;
  }
}

TEST(Wkl, CommutingFormAgrees) {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = rng.integer(1, 5);
    const auto c = testsupport::commuting_spd(rng, d);
    const EllipticDist mu0(rng.vector(d), SpdMatrix(c.a)), mu1(rng.vector(d), SpdMatrix(c.b));
    EXPECT_LT(testsupport::rel_diff(wkl_commuting(mu0, mu1).value, wkl(mu0, mu1).value), 1e-9);
  }
}

TEST(Wkl, CommutingFormWithSharedEigenvalues) {
  // Σ0 and Σ1 agree on one eigendirection, so R − I is exactly singular there.
  const Matrix s0 = Vector{{1.0, 2.0}}.asDiagonal();
  const Matrix s1 = Vector{{1.0, 5.0}}.asDiagonal();
  const EllipticDist mu0 = EllipticDist::gaussian(Vector{{0.0, 0.0}}, s0);
  const EllipticDist mu1 = EllipticDist::gaussian(Vector{{0.7, -0.4}}, s1);
  EXPECT_LT(testsupport::rel_diff(wkl_commuting(mu0, mu1).value, wkl(mu0, mu1).value), 1e-9);
  EXPECT_LT(testsupport::rel_diff(wkl_literal(mu0, mu1), wkl(mu0, mu1).value), 1e-9);
}

TEST(Wkl, CommutingFormRejectsNonCommuting) {
  const EllipticDist mu0 = EllipticDist::gaussian(Vector::Zero(2), Vector{{1.0, 2.0}}.asDiagonal());
  const EllipticDist mu1 = EllipticDist::gaussian(Vector::Zero(2), Matrix{{2.0, 0.5}, {0.5, 1.0}});
  EXPECT_THROW(wkl_commuting(mu0, mu1), Error);
  EXPECT_NO_THROW(wkl(mu0, mu1));
}

TEST(Wkl, Diagnostics) {
  const DivergenceResult r = wkl(gauss1(0, 1), gauss1(1, 4));
  ASSERT_TRUE(r.diagnostics.count("R"));
  EXPECT_NEAR(r.diagnostics.at("R")(0, 0), 2.0, 1e-14);
}

TEST(Kwkl, EqualDistributionsAndSameVariance) {
  Rng rng(34);
  const auto c = testsupport::commuting_spd(rng, 3);
  const EllipticDist mu(rng.vector(3), SpdMatrix(c.a));
  EXPECT_LE(kwkl(mu, mu, 0.3).value, 1e-14);
  const EllipticDist nu(rng.vector(3), SpdMatrix(c.a));
  EXPECT_NEAR(kwkl(mu, nu, 0.3).value, kw_same_variance(mu.mean, nu.mean, mu.scale, 1.0, 0.3).value, 1e-12);
}

TEST(Kwkl, NoiseFloorIdentity) {
  Rng rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = rng.integer(1, 4);
    const Matrix s = rng.spd(d);
    const double lambda = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    const EllipticDist mu0 = EllipticDist::gaussian(rng.vector(d), s), mu1 = EllipticDist::gaussian(rng.vector(d), s);
    EXPECT_NEAR(kwkl(mu0, mu1, lambda).value, kl_inflated(mu0.mean, mu1.mean, s, lambda), 1e-10);
  }
}

TEST(Kwkl, TendsToKlAsLambdaVanishesAtEqualScales) {
  Rng rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = rng.integer(1, 3);
    const Matrix s = rng.spd(d, 0.5, 2.0);
    const EllipticDist mu0 = EllipticDist::gaussian(rng.vector(d), s), mu1 = EllipticDist::gaussian(rng.vector(d), s);
    const double kl = kl_gaussian(mu0, mu1).value;
    double previous = INFINITY;
    for (double lambda : {1e-2, 1e-4, 1e-6}) {
      const double gap = std::abs(kwkl(mu0, mu1, lambda).value - kl);
      EXPECT_LT(gap, previous);
      previous = gap;
    }
    EXPECT_LT(previous, 1e-5 * std::max(1.0, kl));
  }
}

// With unequal scales the λ → 0 limit is Σᵢ ¼(1 + Δm̃ᵢ²/(κ(√s1ᵢ − √s0ᵢ)²))(rᵢ − 1 − ln rᵢ), rᵢ = s1ᵢ/s0ᵢ,
// obtained by expanding the componentwise energy to first order in λ. It differs from KL.
TEST(Kwkl, SmallLambdaLimitWithUnequalScales) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = rng.integer(1, 3);
    const Matrix q = rng.orthogonal(d);
    const Vector s0 = rng.spectrum(d, 0.5, 2.0);
    const Vector s1 = s0.cwiseProduct(rng.spectrum(d, 1.2, 3.0));
    const EllipticFamily fam = trial % 2 ? EllipticFamily::gaussian() : EllipticFamily::student_t(4);
    const double k = kappa(fam);
    const EllipticDist mu0(rng.vector(d), SpdMatrix(Rng::in_basis(q, s0)), fam);
    const EllipticDist mu1(rng.vector(d), SpdMatrix(Rng::in_basis(q, s1)), fam);
    const Vector dm = q.transpose() * (mu1.mean - mu0.mean);
    double limit = 0.0;
    for (Index i = 0; i < d; ++i) {
      const double r = s1(i) / s0(i), root_gap = std::sqrt(s1(i)) - std::sqrt(s0(i));
      limit += 0.25 * (1 + dm(i) * dm(i) / (k * root_gap * root_gap)) * (r - 1 - std::log(r));
    }
    double previous = INFINITY;
    for (double lambda : {1e-2, 1e-4, 1e-6}) {
      const double gap = std::abs(kwkl(mu0, mu1, lambda).value - limit);
      EXPECT_LT(gap, previous);
      previous = gap;
    }
    EXPECT_LT(previous, 1e-4 * std::max(1.0, limit));
  }
}

TEST(Kwkl, BranchesAgreeNearThreshold) {
  const double lambda = 0.7;
  const EllipticDist mu0 = gauss1(0.1, 1.3);
  const EllipticDist flat = gauss1(0.9, 1.3 * (1 + 1e-13));   // β = 0 branch
  const EllipticDist tilted = gauss1(0.9, 1.3 * (1 + 1e-11)); // β ≠ 0 branch
  const EllipticDist wider = gauss1(0.9, 1.3 * (1 + 1e-7));
  const double a = kwkl(mu0, flat, lambda).value;
  const double b = kwkl(mu0, tilted, lambda).value;
  const double c = kwkl(mu0, wider, lambda).value;
  EXPECT_NEAR(a, b, 1e-6);
  EXPECT_NEAR(b, c, 1e-6);
  EXPECT_NEAR(a, kw_same_variance(mu0.mean, flat.mean, mu0.scale, 1.0, lambda).value, 1e-12);
}

TEST(Kwkl, BoundViolationWarnsOnly) {
  // λ < κ s0 s1/(s1 − s0) = 2 is violated at λ = 3, yet the path stays valid.
  const DivergenceResult r = kwkl(gauss1(0, 1), gauss1(1, 2), 3.0);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GT(r.value, 0.0);
  EXPECT_TRUE(kwkl(gauss1(0, 1), gauss1(1, 2), 1.0).warnings.empty());
}

TEST(Kwkl, RejectsNonCommutingAndBadLambda) {
  const EllipticDist mu0 = EllipticDist::gaussian(Vector::Zero(2), Vector{{1.0, 2.0}}.asDiagonal());
  const EllipticDist mu1 = EllipticDist::gaussian(Vector::Zero(2), Matrix{{2.0, 0.5}, {0.5, 1.0}});
  try {
    kwkl(mu0, mu1, 1.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonCommutingScales);
  }
  EXPECT_THROW(kwkl(mu0, mu0, 0.0), Error);
}

TEST(KwSameVariance, Examples) {
  const Vector m0 = Vector::Zero(1), m1 = Vector::Constant(1, 0.5);
  EXPECT_EQ(kw_same_variance(m0, m0, SpdMatrix::identity(1), 1.0, 1.0).value, 0.0);
  EXPECT_DOUBLE_EQ(kw_same_variance(m0, m1, SpdMatrix::identity(1), 1.0, 1.0).value, 0.0625);
  const SpdMatrix tiny(Matrix::Constant(1, 1, 1e-14));
  EXPECT_NEAR(kw_same_variance(m0, m1, tiny, 1.0, 1.0).value, 0.125, 1e-14);
  EXPECT_THROW(kw_same_variance(m0, m1, SpdMatrix::identity(1), 1.0, -1.0), Error);
}

TEST(KwComparison, InterpolationRatios) {
  const double dm2 = 0.25;
  const auto kl = [&](double var) { return kl_gaussian(gauss1(0, var), gauss1(0.5, var)).value; };
  const auto kw = [&](double var) { return kwkl(gauss1(0, var), gauss1(0.5, var), 1.0).value; };
  const auto w = [&](double var) { return wkl(gauss1(0, var), gauss1(0.5, var)).value; };
  for (double var : {0.5, 1.0, 5.0}) {
    EXPECT_NEAR(kl(var), dm2 / (2 * var), 1e-12);
    EXPECT_NEAR(kw(var), dm2 / (2 * (var + 1)), 1e-12);
    EXPECT_NEAR(w(var), 0.125, 1e-12);
  }
  EXPECT_NEAR(kw(1e4) / kl(1e4), 1.0, 1e-3);
  EXPECT_NEAR(kw(1e-6) / w(1e-6), 1.0, 1e-5);
}

TEST(Stein, Examples) {
  const SpdMatrix one = SpdMatrix::identity(1), four(Matrix::Constant(1, 1, 4.0));
  EXPECT_EQ(stein_bilinear(four, four, one).value, 0.0);
  const double expected = 0.25 * (4 - 1 - std::log(4.0));
  EXPECT_NEAR(stein_bilinear(one, four, one).value, expected, 1e-15);
  EXPECT_NEAR(expected, 0.4034, 1e-4);
  EXPECT_NEAR(stein_bilinear(one, four, one).value,
              0.5 * kl_gaussian(EllipticDist::gaussian(Vector::Zero(1), four), EllipticDist::gaussian(Vector::Zero(1), one)).value,
              1e-15);
}

TEST(Stein, KernelScaling) {
  Rng rng(37);
  const auto c = testsupport::commuting_spd(rng, 3);
  const SpdMatrix s0(c.a), s1(c.b);
  const double base = stein_bilinear(s0, s1, SpdMatrix::identity(3)).value;
  EXPECT_NEAR(stein_bilinear(s0, s1, SpdMatrix(2 * Matrix::Identity(3, 3))).value, base / 2, 1e-14);
}

TEST(Stein, HalfReverseKl) {
  Rng rng(38);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = rng.integer(1, 4);
    const auto c = testsupport::commuting_spd(rng, d);
    const double stein = stein_bilinear(SpdMatrix(c.a), SpdMatrix(c.b), SpdMatrix::identity(d)).value;
    const double kl = kl_gaussian(EllipticDist::gaussian(Vector::Zero(d), c.b), EllipticDist::gaussian(Vector::Zero(d), c.a)).value;
    EXPECT_NEAR(stein, 0.5 * kl, 1e-10);
  }
}

TEST(Coulomb, ZeroSymmetricAndOneDimensional) {
  EXPECT_LE(coulomb_1d(gauss1(0.3, 2), gauss1(0.3, 2)).value, 1e-15);
  Rng rng(39);
  for (int trial = 0; trial < 50; ++trial) {
    const EllipticDist a = gauss1(rng.normal(), rng.uniform(0.1, 4)), b = gauss1(rng.normal(), rng.uniform(0.1, 4));
    EXPECT_NEAR(coulomb_1d(a, b).value, coulomb_1d(b, a).value, 1e-14);
    EXPECT_GE(coulomb_1d(a, b).value, 0.0);
  }
  const EllipticDist two = EllipticDist::gaussian(Vector::Zero(2), Matrix::Identity(2, 2));
  try {
    coulomb_1d(two, two);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedDimension);
  }
}

TEST(Coulomb, FoldedNormalMean) {
  EXPECT_NEAR(detail::folded_normal_mean(0, 1), std::sqrt(2 / std::numbers::pi), 1e-15);
  EXPECT_NEAR(detail::folded_normal_mean(50, 1), 50.0, 1e-12);
  EXPECT_NEAR(detail::folded_normal_mean(-3, 0), 3.0, 0.0);
}

TEST(Coulomb, MonteCarlo) {
  // (3/4)(2E|X − Y| − E|X − X'| − E|Y − Y'|) with X, X' ~ N(0,1), Y, Y' ~ N(2,1).
  GaussianNoise noise(77);
  const int n = 10'000'000;
  double cross = 0.0, self0 = 0.0, self1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = noise.standard_normal(), xp = noise.standard_normal();
    const double y = 2 + noise.standard_normal(), yp = 2 + noise.standard_normal();
    cross += std::abs(x - y);
    self0 += std::abs(x - xp);
    self1 += std::abs(y - yp);
  }
  const double mc = 0.75 * (2 * cross - self0 - self1) / n;
  EXPECT_NEAR(coulomb_1d(gauss1(0, 1), gauss1(2, 1)).value, mc, 1e-2);
}

TEST(Divergences, NonNegativeAndZeroOnDiagonal) {
  Rng rng(40);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index d = rng.integer(1, 5);
    const auto c = testsupport::commuting_spd(rng, d);
    const EllipticDist mu0 = EllipticDist::gaussian(rng.vector(d), c.a), mu1 = EllipticDist::gaussian(rng.vector(d), c.b);
    const double lambda = rng.uniform(0.05, 2.0);
    EXPECT_GE(kl_gaussian(mu0, mu1).value, 0.0);
    EXPECT_GE(wkl(mu0, mu1).value, 0.0);
    EXPECT_GE(kwkl(mu0, mu1, lambda).value, 0.0);
    EXPECT_GE(kw_same_variance(mu0.mean, mu1.mean, mu0.scale, 1.0, lambda).value, 0.0);
    EXPECT_GE(stein_bilinear(mu0.scale, mu1.scale, SpdMatrix(c.c)).value, 0.0);
    if (trial % 10 == 0) {
      EXPECT_LE(kl_gaussian(mu0, mu0).value, 1e-10);
      EXPECT_LE(wkl(mu0, mu0).value, 1e-10);
      EXPECT_LE(kwkl(mu0, mu0, lambda).value, 1e-10);
      EXPECT_LE(stein_bilinear(mu0.scale, mu0.scale, SpdMatrix(c.c)).value, 1e-10);
    }
    if (d == 1) {
      EXPECT_GE(coulomb_1d(mu0, mu1).value, 0.0);
    }
  }
}

TEST(Divergences, StableHelpers) {
  EXPECT_NEAR(detail::log1p_minus_x(1e-9), -5e-19 + 1e-27 / 3, 1e-33);
  EXPECT_NEAR(detail::log1p_minus_x(-0.05), std::log1p(-0.05) + 0.05, 1e-17);
  EXPECT_NEAR(detail::log1p_minus_x(0.5), std::log(1.5) - 0.5, 1e-16);
  EXPECT_NEAR(detail::one_plus_exp_times_y_minus_one(1e-6), 5e-13 + 1e-18 / 3, 1e-24);
  EXPECT_NEAR(detail::one_plus_exp_times_y_minus_one(2.0), 1 + std::exp(2.0), 1e-14);
}
