#pragma once

// Subcommand bodies, kept free of argument parsing so tests can drive them
// directly. Every command returns data; printing happens in tools/statediv.cpp.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "statediv/cli/csv.hpp"
#include "statediv/divergences.hpp"
#include "statediv/lqr.hpp"
#include "statediv/systems.hpp"

namespace statediv::cli {

enum class Plant { DoubleIntegrator, CartPole };

Plant parse_plant(const std::string& name);
std::string to_string(Plant plant);

/// 0.9 for the double integrator, 0.99 for the cart-pole.
double default_gamma(Plant plant);

struct SweepConfig {
  double rho_min = 1e-10;
  double rho_max = 1e3;
  int points = 20;
  std::vector<double> lambdas{1e-4, 1e-2, 1e-1, 1.0};
  std::optional<double> gamma;
  Plant plant = Plant::DoubleIntegrator;
  std::vector<std::string> regularizers{"kl", "wkl", "kw"};
  std::optional<Vector> mu0;     // zero when unset
  std::optional<Matrix> sigma0;  // identity when unset
  CostConvention cost_convention = CostConvention::Unit;
  CartPoleParams cartpole;
  unsigned threads = 0;  // 0: one per hardware thread

  /// Throws ConfigError.
  void validate() const;
  /// KL, WKL, then KW(λ) for every λ, restricted to the selected kinds.
  std::vector<Regularizer> expanded_regularizers() const;
  double resolved_gamma() const { return gamma.value_or(default_gamma(plant)); }
};

/// 10^(log10 ρmin + k·(log10 ρmax − log10 ρmin)/(points − 1)), k = 0..points−1.
std::vector<double> rho_grid(const SweepConfig& cfg);

/// Plant with Σw = ρI. The cart-pole is linearized about the upright and ZOH-discretized.
LtiSystem make_plant(Plant plant, const CartPoleParams& params, double rho);

struct SweepPoint {
  double rho = 0.0;
  std::vector<std::optional<LqrSolution>> solutions;  // one per expanded regularizer
  std::vector<std::string> errors;                    // empty string when solved
};

struct Sweep {
  std::vector<Regularizer> regularizers;
  std::vector<SweepPoint> points;
};

/// Solves every (ρ, regularizer) pair; points run concurrently, results keep grid order.
Sweep run_sweep(const SweepConfig& cfg);

CsvTable cmd_sweep_gains(const SweepConfig& cfg);
CsvTable cmd_sweep_radius(const SweepConfig& cfg);
CsvTable cmd_sweep_cost(const SweepConfig& cfg);

struct SimulateConfig {
  Plant plant = Plant::DoubleIntegrator;
  Regularizer regularizer = Regularizer::wkl();
  double rho = 1e-4;
  std::optional<double> gamma;
  std::optional<long> steps;   // 50 double integrator, 500 cart-pole
  std::uint64_t seed = 0;
  std::optional<Vector> x0;    // (1, 0) double integrator; q* + 0.05 rad cart-pole
  bool noise = true;           // Σw = ρI during simulation
  CartPoleParams cartpole;
};

/// Columns: step, state entries, input entries (nan on the last row).
CsvTable cmd_simulate(const SimulateConfig& cfg);

struct CartPoleDemoConfig {
  double rho = 1e-6;
  double lambda = 1.0;
  double gamma = 0.99;
  long steps = 500;
  double theta_offset = 0.05;
  double noise = 0.0;  // Σw = noise·I during simulation
  std::uint64_t seed = 0;
  CartPoleParams cartpole;
};

struct ControllerRun {
  std::string label;
  Matrix gain;
  Trajectory trajectory;
  double final_deviation = 0.0;  // ‖q_N − q*‖
  double peak_deviation = 0.0;   // max_k ‖q_k − q*‖
};

/// KL, WKL and KW(λ) controllers on the nonlinear cart-pole.
std::vector<ControllerRun> run_cartpole_demo(const CartPoleDemoConfig& cfg);
/// Columns: step, then <label>.x, .x_dot, .theta, .theta_dot, .u per controller.
CsvTable cmd_cartpole_demo(const CartPoleDemoConfig& cfg);

struct DivergenceArgs {
  std::string kind;  // kl | wkl | kwkl | kw-same | stein | coulomb
  Vector mean0, mean1;
  Matrix cov0, cov1;
  EllipticFamily family = EllipticFamily::gaussian();
  double lambda = 1.0;
  std::optional<Matrix> kernel;  // Stein; identity when unset
  bool check = false;
  int nodes = 128;
};

struct DivergenceReport {
  std::string kind;
  DivergenceResult result;
  std::optional<double> oracle;
  std::string oracle_note;
};

/// Throws statediv::Error for domain failures, ConfigError for bad arguments.
DivergenceReport cmd_divergence(const DivergenceArgs& args);
std::string format_report(const DivergenceReport& report, bool diagnostics);

struct BallConfig {
  std::string kind = "kl";  // kl | wkl | kwkl | coulomb
  double center_mean = 0.0;
  double center_sigma = 1.0;  // standard deviation
  double level = 1.0;
  double lambda = 1.0;
  double m_min = -3.0, m_max = 3.0;
  int m_points = 61;
  double sigma_min = 0.1, sigma_max = 3.0;
  int sigma_points = 30;
};

/// D(center | N(m, σ²)) on the grid. Columns: m, sigma, value, inside, valid.
CsvTable cmd_divergence_ball(const BallConfig& cfg);

}  // namespace statediv::cli
