#include <cmath>

#include "statediv/cli/commands.hpp"
#include "statediv/cli/parse.hpp"
#include "statediv/numfmt.hpp"

namespace statediv::cli {

namespace {

std::vector<std::string> state_names(Plant plant) {
  if (plant == Plant::CartPole) return {"x", "x_dot", "theta", "theta_dot"};
  return {"x1", "x2"};
}

LqrSolution design(Plant plant, const CartPoleParams& params, const Regularizer& reg, double rho, double gamma) {
  const LtiSystem sys = make_plant(plant, params, rho);
  const Index n = sys.state_dim();
  LqrProblem problem{sys, Matrix::Identity(n, n), gamma, reg, Vector::Zero(n), Matrix::Identity(n, n),
                     CostConvention::Half, {}};
  return solve_regularized(problem);
}

double deviation(const Vector& q, const Vector& target) { return (q - target).norm(); }

}  // namespace

CsvTable cmd_simulate(const SimulateConfig& cfg) {
  if (!(cfg.rho >= 0.0) || !std::isfinite(cfg.rho)) throw ConfigError("rho must be non-negative");
  const double gamma = cfg.gamma.value_or(default_gamma(cfg.plant));
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  const long steps = cfg.steps.value_or(cfg.plant == Plant::CartPole ? 500 : 50);
  if (steps < 1) throw ConfigError("steps must be positive");
  const bool cartpole = cfg.plant == Plant::CartPole;
  const Index n = cartpole ? 4 : 2;
  if (cartpole) {
    try {
      cfg.cartpole.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  Vector x0 = cartpole ? Vector(cartpole_upright() + Vector{{0.0, 0.0, 0.05, 0.0}}) : Vector{{1.0, 0.0}};
  if (cfg.x0) {
    if (cfg.x0->size() != n) throw ConfigError("x0 must have " + std::to_string(n) + " entries");
    x0 = *cfg.x0;
  }

  const LqrSolution sol = design(cfg.plant, cfg.cartpole, cfg.regularizer, cfg.rho, gamma);
  const Matrix noise_cov = (cfg.noise ? cfg.rho : 0.0) * Matrix::Identity(n, n);
  Trajectory traj;
  if (cartpole) {
    traj = simulate_cartpole(cfg.cartpole, sol.F, x0, steps, noise_cov, cfg.seed);
  } else {
    traj = simulate_lti(double_integrator(noise_cov), sol.F, x0, steps, cfg.seed);
  }

  std::vector<std::string> header{"step"};
  for (const std::string& s : state_names(cfg.plant)) header.push_back(s);
  header.push_back("u");
  CsvTable table(header);
  table.add_meta("command", "simulate");
  table.add_meta("revision", build_revision());
  table.add_meta("system", to_string(cfg.plant));
  table.add_meta("regularizer", cfg.regularizer.label());
  table.add_meta("rho", format_double(cfg.rho));
  table.add_meta("gamma", format_double(gamma));
  table.add_meta("seed", std::to_string(cfg.seed));
  table.add_meta("steps", std::to_string(steps));
  table.add_meta("x0", format_vector(x0));
  table.add_meta("noise", cfg.noise ? "rho*I" : "off");
  table.add_meta("gain", format_matrix(sol.F));
  table.add_meta("closed_loop_radius", format_double(sol.closed_loop_radius));
  if (cartpole) {
    const CartPoleParams& p = cfg.cartpole;
    table.add_meta("cartpole", "m_c=" + format_double(p.cart_mass) + " m_p=" + format_double(p.pole_mass) +
                                   " l=" + format_double(p.length) + " g=" + format_double(p.gravity) +
                                   " T_s=" + format_double(p.sample_time));
  }
  if (traj.diverged) table.add_meta("diverged", traj.failure);

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::vector<double> row{static_cast<double>(traj.steps[k])};
    for (Index i = 0; i < n; ++i) row.push_back(traj.states[k](i));
    row.push_back(k < traj.inputs.size() ? traj.inputs[k](0) : std::nan(""));
    table.add_row(row);
  }
  return table;
}

std::vector<ControllerRun> run_cartpole_demo(const CartPoleDemoConfig& cfg) {
  try {
    cfg.cartpole.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.steps < 1) throw ConfigError("steps must be positive");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (!(cfg.rho > 0.0)) throw ConfigError("rho must be positive");
  if (!(cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(cfg.noise >= 0.0)) throw ConfigError("noise must be non-negative");

  const Vector upright = cartpole_upright();
  const Vector q0 = upright + Vector{{0.0, 0.0, cfg.theta_offset, 0.0}};
  std::vector<ControllerRun> runs;
  for (const Regularizer& reg : {Regularizer::kl(), Regularizer::wkl(), Regularizer::kw(cfg.lambda)}) {
    ControllerRun run;
    run.label = reg.label();
    run.gain = design(Plant::CartPole, cfg.cartpole, reg, cfg.rho, cfg.gamma).F;
    run.trajectory = simulate_cartpole(cfg.cartpole, run.gain, q0, cfg.steps, cfg.noise * Matrix::Identity(4, 4), cfg.seed);
    for (const Vector& q : run.trajectory.states) run.peak_deviation = std::max(run.peak_deviation, deviation(q, upright));
    run.final_deviation = run.trajectory.diverged ? std::nan("") : deviation(run.trajectory.states.back(), upright);
    runs.push_back(std::move(run));
  }
  return runs;
}

CsvTable cmd_cartpole_demo(const CartPoleDemoConfig& cfg) {
  const std::vector<ControllerRun> runs = run_cartpole_demo(cfg);
  std::vector<std::string> header{"step"};
  for (const ControllerRun& run : runs) {
    for (const std::string& s : state_names(Plant::CartPole)) header.push_back(run.label + "." + s);
    header.push_back(run.label + ".u");
  }
  CsvTable table(header);
  table.add_meta("command", "cartpole-demo");
  table.add_meta("revision", build_revision());
  table.add_meta("rho", format_double(cfg.rho));
  table.add_meta("gamma", format_double(cfg.gamma));
  table.add_meta("theta_offset", format_double(cfg.theta_offset));
  table.add_meta("noise", format_double(cfg.noise));
  table.add_meta("seed", std::to_string(cfg.seed));
  for (const ControllerRun& run : runs) {
    table.add_meta(run.label, "gain " + format_matrix(run.gain) + ", final deviation " +
                                  format_double(run.final_deviation) + ", peak deviation " +
                                  format_double(run.peak_deviation) +
                                  (run.trajectory.diverged ? ", diverged: " + run.trajectory.failure : ""));
  }
  for (long k = 0; k <= cfg.steps; ++k) {
    std::vector<double> row{static_cast<double>(k)};
    for (const ControllerRun& run : runs) {
      const auto& t = run.trajectory;
      const auto idx = static_cast<std::size_t>(k);
      for (Index i = 0; i < 4; ++i) row.push_back(idx < t.states.size() ? t.states[idx](i) : std::nan(""));
      row.push_back(idx < t.inputs.size() ? t.inputs[idx](0) : std::nan(""));
    }
    table.add_row(row);
  }
  return table;
}

}  // namespace statediv::cli
