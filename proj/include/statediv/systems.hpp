#pragma once

// Benchmark plants: the discrete double integrator and the cart-pole, plus
// closed-loop simulation with reproducible Gaussian process noise.

#include <cstdint>
#include <string>
#include <vector>

#include "statediv/lqr.hpp"

namespace statediv {

/// A = [[1,1],[0,1]], B = [0;1]; Σw defaults to zero.
LtiSystem double_integrator(const Matrix& noise_cov = Matrix::Zero(2, 2));

/// Defaults: 1 kg cart, 0.1 kg pole, 0.5 m, 9.81 m/s², 20 ms sampling.
struct CartPoleParams {
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double length = 0.5;
  double gravity = 9.81;
  double sample_time = 0.02;

  /// Throws InvalidArgument unless every field is finite and positive.
  void validate() const;
};

struct StateSpace {
  Matrix A;
  Matrix B;
};

/// State q = (x, ẋ, θ, θ̇), θ = 0 hanging down. Upright equilibrium q* = (0, 0, π, 0).
Vector cartpole_upright();

/// Continuous-time linearization about q*.
StateSpace cartpole_linearized(const CartPoleParams& p);

/// Zero-order hold via expm([[A_c, B_c], [0, 0]]·T_s).
StateSpace zoh_discretize(const Matrix& a_c, const Matrix& b_c, double sample_time);

struct Trajectory {
  std::vector<long> steps;
  std::vector<Vector> states;  // steps.size() entries
  std::vector<Vector> inputs;  // one fewer than states
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string failure;
};

/// x_{t+1} = (A + BF)x_t + w_t, w_t ~ N(0, Σw) from GaussianNoise(seed).
Trajectory simulate_lti(const LtiSystem& sys, const Matrix& f, const Vector& x0, long steps, std::uint64_t seed);

/// q̇ = f(q, u) from the Euler–Lagrange equations. Throws SingularMassMatrix.
Vector cartpole_rhs(const CartPoleParams& p, const Vector& q, double u);

/// One classical RK4 step of length dt.
Vector cartpole_step(const CartPoleParams& p, const Vector& q, double u, double dt);

/// Kinetic plus potential energy (zero potential at the pivot height).
double cartpole_energy(const CartPoleParams& p, const Vector& q);

/// u_k = F(q_k − q*) held over each sampling interval, integrated with
/// `substeps` RK4 steps, then w_k ~ N(0, Σw) added to the state. A singular
/// mass matrix or non-finite state ends the run with diverged = true.
Trajectory simulate_cartpole(const CartPoleParams& p, const Matrix& f, const Vector& q0, long steps,
                             const Matrix& noise_cov, std::uint64_t seed, int substeps = 10);

}  // namespace statediv
