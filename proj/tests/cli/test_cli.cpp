#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "statediv/cli/commands.hpp"
#include "statediv/cli/config.hpp"
#include "statediv/cli/parse.hpp"

using namespace statediv;
using namespace statediv::cli;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double peak_abs(const CsvTable& t, const std::string& col) {
  double peak = 0.0;
  for (std::size_t r = 0; r < t.rows().size(); ++r) peak = std::max(peak, std::abs(t.number(r, col)));
  return peak;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(STATEDIV_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RhoGrid, Default) {
  const std::vector<double> grid = rho_grid(SweepConfig{});
  ASSERT_EQ(grid.size(), 20u);
  EXPECT_EQ(grid.front(), 1e-10);
  EXPECT_LT(rel(grid[1], 4.83293023857175e-10), 1e-14);
  EXPECT_EQ(grid.back(), 1e3);
  SweepConfig bad;
  bad.points = 1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.points = 5;
  bad.rho_min = 1e4;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Sweep, GainsMatchReferenceValues) {
  const CsvTable t = cmd_sweep_gains(SweepConfig{});
  ASSERT_EQ(t.rows().size(), 20u);
  for (std::size_t r = 0; r < 20; ++r) {
    EXPECT_LT(rel(t.number(r, "WKL.F1_1"), -0.388181584816695), 1e-9);
    EXPECT_LT(rel(t.number(r, "WKL.F1_2"), -1.18173454473589), 1e-9);
  }
  EXPECT_LT(rel(t.number(0, "KL.F1_1"), -8.0999815563995e-09), 1e-8);
  EXPECT_LT(rel(t.number(19, "KW(1).F1_2"), -1.58747456374797), 1e-9);
}

TEST(Sweep, RadiusAndCostExamples) {
  const CsvTable radius = cmd_sweep_radius(SweepConfig{});
  EXPECT_LT(rel(radius.number(19, "KL"), 0.411416483288659), 1e-9);
  EXPECT_LT(rel(radius.number(0, "KW(0.01)"), 0.839858247064877), 1e-9);
  EXPECT_LT(rel(radius.number(7, "WKL"), 0.454364435316859), 1e-9);
  const CsvTable cost = cmd_sweep_cost(SweepConfig{});
  EXPECT_LT(rel(cost.number(0, "WKL"), 6.97198896459554), 1e-8);
  EXPECT_LT(rel(cost.number(0, "KL"), 1729.99384437971), 1e-8);
  EXPECT_LT(rel(cost.number(19, "KW(1)"), 43765.0611598644), 1e-8);

  SweepConfig half;
  half.cost_convention = CostConvention::Half;
  half.regularizers = {"wkl"};
  EXPECT_LT(rel(cmd_sweep_cost(half).number(0, "WKL"), 0.5 * 6.97198896459554), 1e-8);
}

TEST(Sweep, ByteStableAcrossRunsAndThreadCounts) {
  SweepConfig one;
  one.threads = 1;
  SweepConfig many;
  many.threads = 4;
  const std::string a = cmd_sweep_radius(one).str();
  EXPECT_EQ(a, cmd_sweep_radius(one).str());
  EXPECT_EQ(a, cmd_sweep_radius(many).str());
}

TEST(Sweep, RegularizerSelection) {
  SweepConfig cfg;
  cfg.regularizers = {"kw"};
  cfg.lambdas = {0.5, 2.0};
  const std::vector<Regularizer> regs = cfg.expanded_regularizers();
  ASSERT_EQ(regs.size(), 2u);
  EXPECT_EQ(regs[0].label(), "KW(0.5)");
  EXPECT_EQ(regs[1].label(), "KW(2)");
  cfg.regularizers = {"l1"};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Simulate, KlOscillatesMoreThanWkl) {
  SimulateConfig cfg;
  cfg.seed = 3;
  cfg.regularizer = Regularizer::kl();
  const CsvTable kl = cmd_simulate(cfg);
  cfg.regularizer = Regularizer::wkl();
  const CsvTable wkl = cmd_simulate(cfg);
  EXPECT_GT(peak_abs(kl, "x1"), peak_abs(wkl, "x1"));
  EXPECT_EQ(wkl.str(), cmd_simulate(cfg).str());
  EXPECT_TRUE(std::isnan(wkl.number(wkl.rows().size() - 1, "u")));
}

TEST(Simulate, NoiselessWklDecaysGeometrically) {
  SimulateConfig cfg;
  cfg.noise = false;
  cfg.steps = 40;
  const CsvTable t = cmd_simulate(cfg);
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    const double norm = std::hypot(t.number(r, "x1"), t.number(r, "x2"));
    EXPECT_LE(norm, 10.0 * std::pow(0.46, static_cast<double>(r)));
  }
}

TEST(CartPoleDemo, KlPeakExceedsWkl) {
  const std::vector<ControllerRun> runs = run_cartpole_demo(CartPoleDemoConfig{});
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0].label, "KL");
  EXPECT_EQ(runs[1].label, "WKL");
  EXPECT_LT(runs[1].final_deviation, 1e-2);
  EXPECT_LT(runs[2].final_deviation, 1e-2);
  EXPECT_GE(runs[0].peak_deviation, 5.0 * runs[1].peak_deviation);
}

TEST(Divergence, Examples) {
  DivergenceArgs kw;
  kw.kind = "kwkl";
  kw.mean0 = Vector::Zero(1);
  kw.mean1 = Vector::Constant(1, 0.5);
  kw.cov0 = kw.cov1 = Matrix::Identity(1, 1);
  EXPECT_NEAR(cmd_divergence(kw).result.value, 0.0625, 1e-15);

  DivergenceArgs kl = kw;
  kl.kind = "kl";
  kl.mean1 = kl.mean0;
  EXPECT_EQ(cmd_divergence(kl).result.value, 0.0);

  DivergenceArgs w;
  w.kind = "wkl";
  w.mean0 = Vector{{0.0, 1.0}};
  w.mean1 = Vector{{1.0, -1.0}};
  w.cov0 = Matrix{{2.0, 0.3}, {0.3, 1.0}};
  w.cov1 = Matrix{{1.0, -0.2}, {-0.2, 0.5}};
  w.check = true;
  const DivergenceReport report = cmd_divergence(w);
  ASSERT_TRUE(report.oracle.has_value());
  EXPECT_LT(std::abs(*report.oracle - report.result.value), 1e-8);
  EXPECT_NE(format_report(report, false).find("abs_diff"), std::string::npos);

  DivergenceArgs bad = kw;
  bad.kind = "hellinger";
  EXPECT_THROW(cmd_divergence(bad), ConfigError);
}

TEST(DivergenceBall, CenterAndWklHalfWidth) {
  BallConfig cfg;
  cfg.kind = "wkl";
  cfg.m_min = -3.0;
  cfg.m_max = 3.0;
  cfg.m_points = 601;
  cfg.sigma_min = 1.0;
  cfg.sigma_max = 2.0;
  cfg.sigma_points = 2;
  const CsvTable t = cmd_divergence_ball(cfg);
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    if (t.number(r, "sigma") != 1.0) continue;
    const double m = t.number(r, "m");
    if (std::abs(std::abs(m) - std::sqrt(2.0)) < 1e-9) continue;
    EXPECT_EQ(t.number(r, "inside") == 1.0, std::abs(m) < std::sqrt(2.0)) << m;
    if (m == 0.0) EXPECT_EQ(t.number(r, "value"), 0.0);
  }
}

TEST(DivergenceBall, KlMaskWidensWithSigma) {
  BallConfig cfg;
  cfg.sigma_min = 0.6;
  cfg.sigma_max = 2.5;
  cfg.sigma_points = 20;
  cfg.m_points = 301;
  cfg.m_min = -6.0;
  cfg.m_max = 6.0;
  const CsvTable t = cmd_divergence_ball(cfg);
  std::map<double, int> width;
  for (std::size_t r = 0; r < t.rows().size(); ++r) width[t.number(r, "sigma")] += t.number(r, "inside") == 1.0;
  int previous = -1;
  for (const auto& [sigma, count] : width) {
    EXPECT_GE(count, previous) << sigma;
    previous = count;
  }
  EXPECT_GT(width.rbegin()->second, width.begin()->second);
}

TEST(Config, ParseFormats) {
  const auto kv = parse_config("# comment\nrho-min = 1e-5\npoints=7\nlambda = 0.1,1\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"rho-min", "1e-5"}));
  EXPECT_EQ(kv[2].second, "0.1,1");
  const auto js = parse_config(R"({"points": 5, "lambda": [0.5, 2], "check": true, "no-noise": false})");
  const std::multimap<std::string, std::string> entries(js.begin(), js.end());
  EXPECT_EQ(entries, (std::multimap<std::string, std::string>{{"check", ""}, {"lambda", "0.5"}, {"lambda", "2"}, {"points", "5"}}));
  EXPECT_THROW(parse_config("{\"points\": "), ConfigError);
}

TEST(Config, FlagsWinOverFile) {
  const std::vector<std::string> merged =
      merge_config_args({"sweep-gains", "--points=3"}, "points = 9\nrho-max = 10\n");
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_EQ(merged[1], "--points=3");
  EXPECT_EQ(merged[2], "--rho-max=10");
}

TEST(Parse, RoundTrip) {
  const Matrix m = parse_matrix("1,0.5;0.5,2");
  EXPECT_EQ(m, (Matrix{{1.0, 0.5}, {0.5, 2.0}}));
  EXPECT_EQ(parse_matrix(format_matrix(m)), m);
  EXPECT_EQ(parse_vector("1e-3,-2"), (Vector{{1e-3, -2.0}}));
  EXPECT_EQ(statediv::kappa(parse_family("student:4")), 2.0);
  EXPECT_THROW(parse_matrix("1,2;3"), ConfigError);
  EXPECT_THROW(parse_number("abc"), ConfigError);
}

TEST(Tool, ExitCodesAndConfigFile) {
  EXPECT_EQ(run_tool("divergence --kind kl --mean1 0.5"), 0);
  EXPECT_EQ(run_tool("sweep-gains --points 1"), 2);
  EXPECT_EQ(run_tool("sweep-gains --bogus"), 2);
  EXPECT_EQ(run_tool("divergence --kind kl --cov0 0"), 4);
  EXPECT_EQ(run_tool("simulate --system cartpole --regularizer kl --rho 1e-10 --length 1e-5 --steps 3"), 3);

  const auto dir = std::filesystem::temp_directory_path() / "statediv_cli_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream cfg(dir / "sim.json");
    cfg << R"({"seed": 11, "steps": 20, "rho": 0.001})";
  }
  const std::string base = "simulate --config " + (dir / "sim.json").string();
  ASSERT_EQ(run_tool(base + " --out " + (dir / "a.csv").string()), 0);
  ASSERT_EQ(run_tool(base + " --out " + (dir / "b.csv").string()), 0);
  ASSERT_EQ(run_tool(base + " --seed 12 --out " + (dir / "c.csv").string()), 0);
  const std::string a = slurp(dir / "a.csv");
  EXPECT_EQ(a, slurp(dir / "b.csv"));
  EXPECT_NE(a.find("# seed: 11"), std::string::npos);
  EXPECT_NE(a.find("# steps: 20"), std::string::npos);
  EXPECT_NE(slurp(dir / "c.csv").find("# seed: 12"), std::string::npos);
  std::filesystem::remove_all(dir);
}
