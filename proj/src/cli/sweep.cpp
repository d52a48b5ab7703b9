#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "statediv/cli/commands.hpp"
#include "statediv/cli/parse.hpp"
#include "statediv/numfmt.hpp"

namespace statediv::cli {

namespace {

SweepPoint solve_point(const SweepConfig& cfg, const std::vector<Regularizer>& regs, double rho) {
  SweepPoint point;
  point.rho = rho;
  const LtiSystem sys = make_plant(cfg.plant, cfg.cartpole, rho);
  const Index n = sys.state_dim();
  for (const Regularizer& reg : regs) {
    LqrProblem problem{sys,
                       Matrix::Identity(n, n),
                       cfg.resolved_gamma(),
                       reg,
                       cfg.mu0.value_or(Vector::Zero(n)),
                       cfg.sigma0.value_or(Matrix::Identity(n, n)),
                       cfg.cost_convention,
                       {}};
    try {
      point.solutions.push_back(solve_regularized(problem));
      point.errors.emplace_back();
    } catch (const Error& e) {
      point.solutions.push_back(std::nullopt);
      point.errors.push_back(e.what());
    }
  }
  return point;
}

CsvTable sweep_table(const SweepConfig& cfg, const std::string& command, const Sweep& sweep,
                     const std::vector<std::string>& header) {
  CsvTable table(header);
  table.add_meta("command", command);
  table.add_meta("revision", build_revision());
  table.add_meta("system", to_string(cfg.plant));
  table.add_meta("gamma", format_double(cfg.resolved_gamma()));
  table.add_meta("rho", format_double(cfg.rho_min) + ".." + format_double(cfg.rho_max) + " log, " +
                            std::to_string(cfg.points) + " points");
  table.add_meta("lambdas", format_list(cfg.lambdas));
  std::string labels;
  for (const Regularizer& r : sweep.regularizers) labels += (labels.empty() ? "" : ",") + r.label();
  table.add_meta("regularizers", labels);
  table.add_meta("Q", "identity");
  for (const SweepPoint& p : sweep.points) {
    for (std::size_t j = 0; j < p.errors.size(); ++j) {
      if (!p.errors[j].empty()) {
        table.add_meta("error", "rho=" + format_double(p.rho) + " " + sweep.regularizers[j].label() + " " + p.errors[j]);
      }
    }
  }
  return table;
}

}  // namespace

Plant parse_plant(const std::string& name) {
  if (name == "double-integrator") return Plant::DoubleIntegrator;
  if (name == "cartpole") return Plant::CartPole;
  throw ConfigError("unknown system '" + name + "' (expected double-integrator or cartpole)");
}

std::string to_string(Plant plant) { return plant == Plant::CartPole ? "cartpole" : "double-integrator"; }

double default_gamma(Plant plant) { return plant == Plant::CartPole ? 0.99 : 0.9; }

void SweepConfig::validate() const {
  if (!(rho_min > 0.0) || !(rho_max > rho_min) || !std::isfinite(rho_max)) {
    throw ConfigError("need 0 < rho-min < rho-max");
  }
  if (points < 2) throw ConfigError("need at least two grid points");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive");
  }
  const double g = resolved_gamma();
  if (!(g > 0.0 && g < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (regularizers.empty()) throw ConfigError("no regularizer selected");
  for (const std::string& r : regularizers) {
    if (r != "kl" && r != "wkl" && r != "kw") throw ConfigError("unknown regularizer '" + r + "' (expected kl, wkl, kw)");
  }
  if (std::count(regularizers.begin(), regularizers.end(), "kw") && lambdas.empty()) {
    throw ConfigError("kw selected without any lambda");
  }
  const Index n = plant == Plant::CartPole ? 4 : 2;
  if (mu0 && mu0->size() != n) throw ConfigError("mu0 must have " + std::to_string(n) + " entries");
  if (sigma0) {
    if (sigma0->rows() != n || sigma0->cols() != n) throw ConfigError("sigma0 must be " + std::to_string(n) + "x" + std::to_string(n));
    try {
      static_cast<void>(SpdMatrix::psd(*sigma0));
    } catch (const Error& e) {
      throw ConfigError(std::string("sigma0: ") + e.what());
    }
  }
  if (plant == Plant::CartPole) {
    try {
      cartpole.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
}

std::vector<Regularizer> SweepConfig::expanded_regularizers() const {
  auto selected = [this](const char* k) { return std::find(regularizers.begin(), regularizers.end(), k) != regularizers.end(); };
  std::vector<Regularizer> out;
  if (selected("kl")) out.push_back(Regularizer::kl());
  if (selected("wkl")) out.push_back(Regularizer::wkl());
  if (selected("kw")) {
    for (double l : lambdas) out.push_back(Regularizer::kw(l));
  }
  return out;
}

std::vector<double> rho_grid(const SweepConfig& cfg) {
  const double lo = std::log10(cfg.rho_min), hi = std::log10(cfg.rho_max);
  std::vector<double> grid(static_cast<std::size_t>(cfg.points));
  for (int k = 0; k < cfg.points; ++k) grid[k] = std::pow(10.0, lo + (hi - lo) * k / (cfg.points - 1));
  grid.front() = cfg.rho_min;
  grid.back() = cfg.rho_max;
  return grid;
}

LtiSystem make_plant(Plant plant, const CartPoleParams& params, double rho) {
  if (plant == Plant::DoubleIntegrator) return double_integrator(rho * Matrix::Identity(2, 2));
  const StateSpace cont = cartpole_linearized(params);
  const StateSpace disc = zoh_discretize(cont.A, cont.B, params.sample_time);
  return LtiSystem(disc.A, disc.B, rho * Matrix::Identity(4, 4));
}

Sweep run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  Sweep sweep;
  sweep.regularizers = cfg.expanded_regularizers();
  const std::vector<double> grid = rho_grid(cfg);
  sweep.points.resize(grid.size());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(cfg.threads ? cfg.threads : hw, grid.size());
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < grid.size(); i += workers) sweep.points[i] = solve_point(cfg, sweep.regularizers, grid[i]);
    }));
  }
  for (auto& job : jobs) job.get();
  return sweep;
}

CsvTable cmd_sweep_gains(const SweepConfig& cfg) {
  const Sweep sweep = run_sweep(cfg);
  const LtiSystem probe = make_plant(cfg.plant, cfg.cartpole, 1.0);
  const Index m = probe.input_dim(), n = probe.state_dim();
  std::vector<std::string> header{"rho"};
  for (const Regularizer& r : sweep.regularizers) {
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) header.push_back(r.label() + ".F" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    }
  }
  CsvTable table = sweep_table(cfg, "sweep-gains", sweep, header);
  for (const SweepPoint& p : sweep.points) {
    std::vector<double> row{p.rho};
    for (const auto& sol : p.solutions) {
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) row.push_back(sol ? sol->F(i, j) : std::nan(""));
      }
    }
    table.add_row(row);
  }
  return table;
}

CsvTable cmd_sweep_radius(const SweepConfig& cfg) {
  const Sweep sweep = run_sweep(cfg);
  std::vector<std::string> header{"rho"};
  for (const Regularizer& r : sweep.regularizers) header.push_back(r.label());
  CsvTable table = sweep_table(cfg, "sweep-radius", sweep, header);
  for (const SweepPoint& p : sweep.points) {
    std::vector<double> row{p.rho};
    for (const auto& sol : p.solutions) row.push_back(sol ? sol->closed_loop_radius : std::nan(""));
    table.add_row(row);
  }
  return table;
}

CsvTable cmd_sweep_cost(const SweepConfig& cfg) {
  const Sweep sweep = run_sweep(cfg);
  std::vector<std::string> header{"rho"};
  for (const Regularizer& r : sweep.regularizers) header.push_back(r.label());
  CsvTable table = sweep_table(cfg, "sweep-cost", sweep, header);
  const Index n = cfg.plant == Plant::CartPole ? 4 : 2;
  table.add_meta("mu0", format_vector(cfg.mu0.value_or(Vector::Zero(n))));
  table.add_meta("sigma0", format_matrix(cfg.sigma0.value_or(Matrix::Identity(n, n))));
  table.add_meta("cost", cfg.cost_convention == CostConvention::Unit ? "unit stage cost x'Qx + u'Ru"
                                                                      : "half stage cost (x'Qx + u'Ru)/2");
  for (const SweepPoint& p : sweep.points) {
    std::vector<double> row{p.rho};
    for (const auto& sol : p.solutions) row.push_back(sol ? sol->cost : std::nan(""));
    table.add_row(row);
  }
  return table;
}

}  // namespace statediv::cli
