#include "statediv/systems.hpp"

#include <cmath>
#include <numbers>

#include "statediv/prng.hpp"

namespace statediv {

namespace {

void check_steps(long steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one step");
}

}  // namespace

LtiSystem double_integrator(const Matrix& noise_cov) {
  Matrix a(2, 2);
  a << 1.0, 1.0, 0.0, 1.0;
  Matrix b(2, 1);
  b << 0.0, 1.0;
  return LtiSystem(a, b, noise_cov);
}

void CartPoleParams::validate() const {
  for (double v : {cart_mass, pole_mass, length, gravity, sample_time}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "cart-pole parameters must be positive");
  }
}

Vector cartpole_upright() { return Vector{{0.0, 0.0, std::numbers::pi, 0.0}}; }

StateSpace cartpole_linearized(const CartPoleParams& p) {
  p.validate();
  const double mc = p.cart_mass, mp = p.pole_mass, l = p.length, g = p.gravity;
  Matrix a = Matrix::Zero(4, 4);
  a(0, 1) = 1.0;
  a(1, 2) = mp * g / mc;
  a(2, 3) = 1.0;
  a(3, 2) = (mc + mp) * g / (l * mc);
  Matrix b(4, 1);
  b << 0.0, 1.0 / mc, 0.0, 1.0 / (l * mc);
  return {a, b};
}

StateSpace zoh_discretize(const Matrix& a_c, const Matrix& b_c, double sample_time) {
  linalg::require_square(a_c, "A_c");
  if (b_c.rows() != a_c.rows()) throw Error(ErrorCode::DimensionMismatch, "B_c must have as many rows as A_c");
  if (!(sample_time > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling time must be positive");
  const Index n = a_c.rows(), m = b_c.cols();
  Matrix block = Matrix::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = a_c * sample_time;
  block.topRightCorner(n, m) = b_c * sample_time;
  const Matrix e = linalg::expm(block);
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

Trajectory simulate_lti(const LtiSystem& sys, const Matrix& f, const Vector& x0, long steps, std::uint64_t seed) {
  check_steps(steps);
  if (f.rows() != sys.input_dim() || f.cols() != sys.state_dim()) throw Error(ErrorCode::DimensionMismatch, "F must be m×n");
  if (x0.size() != sys.state_dim()) throw Error(ErrorCode::DimensionMismatch, "x0 has the wrong size");
  const Matrix factor = noise_factor(sys.noise_cov);
  const bool noisy = factor.cwiseAbs().maxCoeff() > 0.0;
  GaussianNoise noise(seed);

  Trajectory traj;
  traj.seed = seed;
  traj.states.push_back(x0);
  traj.steps.push_back(0);
  Vector x = x0;
  for (long k = 0; k < steps; ++k) {
    const Vector u = f * x;
    x = sys.A * x + sys.B * u;
    if (noisy) x += noise.sample(factor);
    traj.inputs.push_back(u);
    if (!x.allFinite()) {
      traj.inputs.pop_back();
      traj.diverged = true;
      traj.failure = "state became non-finite";
      break;
    }
    traj.states.push_back(x);
    traj.steps.push_back(k + 1);
  }
  return traj;
}

Vector cartpole_rhs(const CartPoleParams& p, const Vector& q, double u) {
  const double mc = p.cart_mass, mp = p.pole_mass, l = p.length, g = p.gravity;
  const double s = std::sin(q(2)), c = std::cos(q(2));
  const double theta_dot = q(3);
  const double m11 = mc + mp, m12 = mp * l * c, m22 = mp * l * l;
  const double det = m11 * m22 - m12 * m12;
  if (!(std::abs(det) >= 1e-9)) throw Error(ErrorCode::SingularMassMatrix, "cart-pole mass matrix is singular");
  const double r1 = u + mp * l * theta_dot * theta_dot * s;
  const double r2 = -mp * g * l * s;
  return Vector{{q(1), (m22 * r1 - m12 * r2) / det, theta_dot, (m11 * r2 - m12 * r1) / det}};
}

Vector cartpole_step(const CartPoleParams& p, const Vector& q, double u, double dt) {
  if (q.size() != 4) throw Error(ErrorCode::DimensionMismatch, "cart-pole state has four entries");
  const Vector k1 = cartpole_rhs(p, q, u);
  const Vector k2 = cartpole_rhs(p, q + 0.5 * dt * k1, u);
  const Vector k3 = cartpole_rhs(p, q + 0.5 * dt * k2, u);
  const Vector k4 = cartpole_rhs(p, q + dt * k3, u);
  return q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double cartpole_energy(const CartPoleParams& p, const Vector& q) {
  const double mc = p.cart_mass, mp = p.pole_mass, l = p.length;
  const double c = std::cos(q(2));
  const double kinetic = 0.5 * (mc + mp) * q(1) * q(1) + mp * l * q(1) * q(3) * c + 0.5 * mp * l * l * q(3) * q(3);
  return kinetic - mp * p.gravity * l * c;
}

Trajectory simulate_cartpole(const CartPoleParams& p, const Matrix& f, const Vector& q0, long steps,
                             const Matrix& noise_cov, std::uint64_t seed, int substeps) {
  p.validate();
  check_steps(steps);
  if (substeps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one RK4 substep");
  if (f.rows() != 1 || f.cols() != 4) throw Error(ErrorCode::DimensionMismatch, "cart-pole gain must be 1×4");
  if (q0.size() != 4) throw Error(ErrorCode::DimensionMismatch, "cart-pole state has four entries");
  const Matrix factor = noise_factor(noise_cov);
  const bool noisy = factor.cwiseAbs().maxCoeff() > 0.0;
  GaussianNoise noise(seed);
  const Vector upright = cartpole_upright();
  const double dt = p.sample_time / substeps;

  Trajectory traj;
  traj.seed = seed;
  traj.states.push_back(q0);
  traj.steps.push_back(0);
  Vector q = q0;
  for (long k = 0; k < steps; ++k) {
    const Vector u = f * (q - upright);
    try {
      for (int j = 0; j < substeps; ++j) q = cartpole_step(p, q, u(0), dt);
    } catch (const Error& e) {
      traj.diverged = true;
      traj.failure = e.what();
      break;
    }
    if (noisy) q += noise.sample(factor);
    if (!q.allFinite()) {
      traj.diverged = true;
      traj.failure = "state became non-finite";
      break;
    }
    traj.inputs.push_back(u);
    traj.states.push_back(q);
    traj.steps.push_back(k + 1);
  }
  return traj;
}

}  // namespace statediv
