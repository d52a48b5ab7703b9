#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "statediv/cli/commands.hpp"
#include "statediv/cli/config.hpp"
#include "statediv/cli/parse.hpp"

using namespace statediv;
using namespace statediv::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitDomain = 4;

struct RawCartPole {
  double mc = 1.0, mp = 0.1, length = 0.5, gravity = 9.81, ts = 0.02;

  void add(CLI::App* app) {
    app->add_option("--mc", mc, "Cart mass [kg]")->capture_default_str();
    app->add_option("--mp", mp, "Pendulum mass [kg]")->capture_default_str();
    app->add_option("--length", length, "Pendulum length [m]")->capture_default_str();
    app->add_option("--gravity", gravity, "Gravity [m/s^2]")->capture_default_str();
    app->add_option("--ts", ts, "Sampling time [s]")->capture_default_str();
  }
  CartPoleParams params() const { return {mc, mp, length, gravity, ts}; }
};

void emit(const CsvTable& table, const std::string& out) {
  if (out.empty()) {
    table.write(std::cout);
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + out + "'");
  table.write(file);
}

std::string sweep_columns(const char* values) {
  return std::string("\nCSV columns:\n  rho            noise variance (Sigma_w = rho*I)\n  ") + values +
         "\nLabels are KL, WKL and KW(<lambda>). Cells of failed solves are nan and the\n"
         "failure is listed in a '# error:' metadata line.\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App app{"Divergence-regularized LQR and divergences between elliptic distributions"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "Flat key=value or JSON file; entries act as flags not given explicitly");

  // Sweeps
  std::string sweep_system = "double-integrator", sweep_regs = "kl,wkl,kw", sweep_out, cost_convention = "unit";
  std::string mu0_text, sigma0_text;
  std::optional<double> sweep_gamma;
  SweepConfig sweep_cfg;
  RawCartPole sweep_cp;
  std::vector<CLI::App*> sweeps;
  const char* sweep_names[] = {"sweep-gains", "sweep-radius", "sweep-cost"};
  const char* sweep_help[] = {
      "Optimal feedback gains over a log-spaced noise grid",
      "Closed-loop spectral radius rho(A+BF) over a log-spaced noise grid",
      "Optimal expected cost over a log-spaced noise grid",
  };
  const char* sweep_cols[] = {
      "<label>.F<r>_<c>  entry (r, c) of the gain F (u = F x)",
      "<label>        spectral radius of A + B F",
      "<label>        J = mu0'P mu0 + tr(P Sigma0) + gamma/(1-gamma) tr(P Sigma_w)\n"
      "                 (unit stage cost; --cost-convention half divides by 2)",
  };
  for (int i = 0; i < 3; ++i) {
    CLI::App* sub = app.add_subcommand(sweep_names[i], sweep_help[i]);
    sub->footer(sweep_columns(sweep_cols[i]));
    sub->add_option("--rho-min", sweep_cfg.rho_min, "Smallest noise variance")->capture_default_str();
    sub->add_option("--rho-max", sweep_cfg.rho_max, "Largest noise variance")->capture_default_str();
    sub->add_option("--points", sweep_cfg.points, "Number of log-spaced grid points")->capture_default_str();
    sub->add_option("--lambda", sweep_cfg.lambdas, "KW weights (repeatable or comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    sub->add_option("--gamma", sweep_gamma, "Discount factor (default 0.9, cart-pole 0.99)");
    sub->add_option("--system", sweep_system, "double-integrator | cartpole")->capture_default_str();
    sub->add_option("--regularizers", sweep_regs, "Subset of kl,wkl,kw")->capture_default_str();
    sub->add_option("--threads", sweep_cfg.threads, "Worker threads (0: hardware concurrency)");
    sub->add_option("--out", sweep_out, "Write CSV here instead of stdout");
    sub->add_option("--config", config_file, "Config file");
    sweep_cp.add(sub);
    if (i == 2) {
      sub->add_option("--cost-convention", cost_convention, "unit | half")->capture_default_str();
      sub->add_option("--mu0", mu0_text, "Initial mean, e.g. \"0,0\" (default zero)");
      sub->add_option("--sigma0", sigma0_text, "Initial covariance, e.g. \"1,0;0,1\" (default identity)");
    }
    sweeps.push_back(sub);
  }

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "Closed-loop trajectory under an LQR gain designed with one regularizer");
  sim->footer(
      "\nCSV columns:\n  step           time index k = 0..N\n"
      "  x1,x2          double-integrator state (position, velocity)\n"
      "  x,x_dot,theta,theta_dot   cart-pole state (theta = pi is upright)\n"
      "  u              input applied on [k, k+1); nan on the final row\n");
  std::string sim_system = "double-integrator", sim_reg = "wkl", sim_x0, sim_out;
  double sim_rho = 1e-4, sim_lambda = 1.0;
  std::optional<double> sim_gamma;
  std::optional<long> sim_steps;
  std::uint64_t sim_seed = 0;
  bool sim_no_noise = false;
  RawCartPole sim_cp;
  sim->add_option("--system", sim_system, "double-integrator | cartpole")->capture_default_str();
  sim->add_option("--regularizer", sim_reg, "kl | wkl | kw")->capture_default_str();
  sim->add_option("--rho", sim_rho, "Noise variance used for design and simulation")->capture_default_str();
  sim->add_option("--lambda", sim_lambda, "KW weight")->capture_default_str();
  sim->add_option("--gamma", sim_gamma, "Discount factor (default 0.9, cart-pole 0.99)");
  sim->add_option("--steps", sim_steps, "Number of steps (default 50, cart-pole 500)");
  sim->add_option("--seed", sim_seed, "Noise seed")->capture_default_str();
  sim->add_option("--x0", sim_x0, "Initial state (default 1,0; cart-pole upright + 0.05 rad)");
  sim->add_flag("--no-noise", sim_no_noise, "Simulate without process noise");
  sim->add_option("--out", sim_out, "Write CSV here instead of stdout");
  sim->add_option("--config", config_file, "Config file");
  sim_cp.add(sim);

  // cartpole-demo
  CLI::App* demo = app.add_subcommand("cartpole-demo", "KL, WKL and KW controllers on the nonlinear cart-pole");
  demo->footer(
      "\nCSV columns:\n  step           time index k = 0..N\n"
      "  <label>.x, .x_dot, .theta, .theta_dot, .u   per controller (KL, WKL, KW(<lambda>))\n"
      "Final and peak deviation from the upright are reported in '#' metadata lines.\n");
  CartPoleDemoConfig demo_cfg;
  std::string demo_out;
  RawCartPole demo_cp;
  demo->add_option("--rho", demo_cfg.rho, "Design noise variance")->capture_default_str();
  demo->add_option("--lambda", demo_cfg.lambda, "KW weight")->capture_default_str();
  demo->add_option("--gamma", demo_cfg.gamma, "Discount factor")->capture_default_str();
  demo->add_option("--steps", demo_cfg.steps, "Number of sampling intervals")->capture_default_str();
  demo->add_option("--theta0", demo_cfg.theta_offset, "Initial angle offset from upright [rad]")->capture_default_str();
  demo->add_option("--noise", demo_cfg.noise, "Simulation noise variance per state")->capture_default_str();
  demo->add_option("--seed", demo_cfg.seed, "Noise seed")->capture_default_str();
  demo->add_option("--out", demo_out, "Write CSV here instead of stdout");
  demo->add_option("--config", config_file, "Config file");
  demo_cp.add(demo);

  // divergence
  CLI::App* div = app.add_subcommand("divergence", "Closed-form divergence D(mu0 | mu1), optionally checked by quadrature");
  div->footer(
      "\nOutput lines: kind, value, and with --check oracle / abs_diff / rel_diff.\n"
      "Matrices are written row-wise: \"1,0;0,2\". cov* are scale matrices (covariance / kappa).\n");
  DivergenceArgs div_args;
  std::string mean0 = "0", mean1 = "0", cov0 = "1", cov1 = "1", family = "gaussian", kernel;
  bool show_diag = false;
  div->add_option("--kind", div_args.kind, "kl | wkl | kwkl | kw-same | stein | coulomb")->required();
  div->add_option("--mean0", mean0, "Mean of mu0")->capture_default_str();
  div->add_option("--mean1", mean1, "Mean of mu1")->capture_default_str();
  div->add_option("--cov0", cov0, "Scale of mu0 (shared scale for kw-same)")->capture_default_str();
  div->add_option("--cov1", cov1, "Scale of mu1")->capture_default_str();
  div->add_option("--family", family, "gaussian | student:<dof> | kappa:<k>")->capture_default_str();
  div->add_option("--lambda", div_args.lambda, "KW weight")->capture_default_str();
  div->add_option("--kernel", kernel, "Stein kernel matrix A (default identity)");
  div->add_flag("--check", div_args.check, "Recompute along the geodesic by Gauss-Legendre quadrature");
  div->add_option("--nodes", div_args.nodes, "Quadrature nodes")->capture_default_str();
  div->add_flag("--diagnostics", show_diag, "Print intermediate matrices");
  div->add_option("--config", config_file, "Config file");

  // divergence-ball
  CLI::App* ball = app.add_subcommand("divergence-ball", "Divergence from a 1-D Gaussian over an (m, sigma) grid");
  ball->footer(
      "\nCSV columns:\n  m, sigma       grid point N(m, sigma^2) (sigma is a standard deviation)\n"
      "  value          D(center | N(m, sigma^2)); nan where undefined\n"
      "  inside         1 if value <= level\n  valid          1 if value is defined\n");
  BallConfig ball_cfg;
  std::string m_range, sigma_range, ball_out;
  ball->add_option("--kind", ball_cfg.kind, "kl | wkl | kwkl | coulomb")->capture_default_str();
  ball->add_option("--center-mean", ball_cfg.center_mean, "Reference mean")->capture_default_str();
  ball->add_option("--center-sigma", ball_cfg.center_sigma, "Reference standard deviation")->capture_default_str();
  ball->add_option("--level", ball_cfg.level, "Sub-level threshold")->capture_default_str();
  ball->add_option("--lambda", ball_cfg.lambda, "KW weight")->capture_default_str();
  ball->add_option("--m-range", m_range, "min,max,count (default -3,3,61)");
  ball->add_option("--sigma-range", sigma_range, "min,max,count (default 0.1,3,30)");
  ball->add_option("--out", ball_out, "Write CSV here instead of stdout");
  ball->add_option("--config", config_file, "Config file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  bool divergence_call = false;
  try {
    for (int i = 0; i < 3; ++i) {
      if (!sweeps[i]->parsed()) continue;
      sweep_cfg.gamma = sweep_gamma;
      sweep_cfg.plant = parse_plant(sweep_system);
      sweep_cfg.cartpole = sweep_cp.params();
      sweep_cfg.regularizers.clear();
      std::stringstream ss(sweep_regs);
      for (std::string r; std::getline(ss, r, ',');) sweep_cfg.regularizers.push_back(r);
      if (cost_convention != "unit" && cost_convention != "half") throw ConfigError("cost convention must be unit or half");
      sweep_cfg.cost_convention = cost_convention == "half" ? CostConvention::Half : CostConvention::Unit;
      if (!mu0_text.empty()) sweep_cfg.mu0 = parse_vector(mu0_text);
      if (!sigma0_text.empty()) sweep_cfg.sigma0 = parse_matrix(sigma0_text);
      const CsvTable table = i == 0 ? cmd_sweep_gains(sweep_cfg) : i == 1 ? cmd_sweep_radius(sweep_cfg) : cmd_sweep_cost(sweep_cfg);
      emit(table, sweep_out);
    }
    if (sim->parsed()) {
      SimulateConfig cfg;
      cfg.plant = parse_plant(sim_system);
      cfg.regularizer = sim_reg == "kw" ? Regularizer::kw(sim_lambda) : parse_regularizer(sim_reg);
      cfg.rho = sim_rho;
      cfg.gamma = sim_gamma;
      cfg.steps = sim_steps;
      cfg.seed = sim_seed;
      if (!sim_x0.empty()) cfg.x0 = parse_vector(sim_x0);
      cfg.noise = !sim_no_noise;
      cfg.cartpole = sim_cp.params();
      emit(cmd_simulate(cfg), sim_out);
    }
    if (demo->parsed()) {
      demo_cfg.cartpole = demo_cp.params();
      emit(cmd_cartpole_demo(demo_cfg), demo_out);
    }
    if (div->parsed()) {
      divergence_call = true;
      div_args.mean0 = parse_vector(mean0);
      div_args.mean1 = parse_vector(mean1);
      div_args.cov0 = parse_matrix(cov0);
      div_args.cov1 = parse_matrix(cov1);
      div_args.family = parse_family(family);
      if (!kernel.empty()) div_args.kernel = parse_matrix(kernel);
      std::cout << format_report(cmd_divergence(div_args), show_diag);
    }
    if (ball->parsed()) {
      divergence_call = true;
      auto range = [](const std::string& text, double& lo, double& hi, int& count) {
        if (text.empty()) return;
        const std::vector<double> v = parse_list(text);
        if (v.size() != 3) throw ConfigError("range must be min,max,count");
        lo = v[0];
        hi = v[1];
        count = static_cast<int>(v[2]);
        if (count != v[2]) throw ConfigError("range count must be an integer");
      };
      range(m_range, ball_cfg.m_min, ball_cfg.m_max, ball_cfg.m_points);
      range(sigma_range, ball_cfg.sigma_min, ball_cfg.sigma_max, ball_cfg.sigma_points);
      emit(cmd_divergence_ball(ball_cfg), ball_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.is_solver_failure()) return kExitSolver;
    return divergence_call ? kExitDomain : kExitConfig;
  }
  return 0;
}
