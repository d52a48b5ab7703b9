#include <cmath>
#include <sstream>

#include "statediv/cli/commands.hpp"
#include "statediv/cli/parse.hpp"
#include "statediv/geodesics.hpp"
#include "statediv/numfmt.hpp"

namespace statediv::cli {

namespace {

EllipticDist make_dist(const Vector& mean, const Matrix& cov, const EllipticFamily& family, const char* which) {
  if (mean.size() != cov.rows()) {
    throw ConfigError(std::string(which) + ": mean has " + std::to_string(mean.size()) + " entries but the scale is " +
                      std::to_string(cov.rows()) + "x" + std::to_string(cov.cols()));
  }
  return EllipticDist(mean, SpdMatrix(cov), family);
}

}  // namespace

DivergenceReport cmd_divergence(const DivergenceArgs& args) {
  if (args.nodes < 8) throw ConfigError("quadrature needs at least 8 nodes");
  DivergenceReport report;
  report.kind = args.kind;
  const std::string& kind = args.kind;

  if (kind == "stein") {
    const SpdMatrix s0(args.cov0), s1(args.cov1);
    const SpdMatrix kernel(args.kernel.value_or(Matrix::Identity(args.cov0.rows(), args.cov0.cols())));
    report.result = stein_bilinear(s0, s1, kernel);
    if (args.check) {
      const GeodesicPath path = stein_path(s0, s1, kernel, args.family);
      report.oracle = divergence_quadrature(path, EllipticDist(Vector::Zero(s1.dim()), s1, args.family), args.nodes);
    }
    return report;
  }
  if (kind == "kw-same") {
    const SpdMatrix scale(args.cov0);
    if (args.mean0.size() != scale.dim() || args.mean1.size() != scale.dim()) {
      throw ConfigError("kw-same: means must match the scale dimension");
    }
    report.result = kw_same_variance(args.mean0, args.mean1, scale, kappa(args.family), args.lambda);
    if (args.check) {
      const EllipticDist mu0(args.mean0, scale, args.family), mu1(args.mean1, scale, args.family);
      report.oracle = divergence_quadrature(kw_path(mu0, mu1, args.lambda), mu1, args.nodes);
    }
    return report;
  }

  const EllipticDist mu0 = make_dist(args.mean0, args.cov0, args.family, "distribution 0");
  const EllipticDist mu1 = make_dist(args.mean1, args.cov1, args.family, "distribution 1");
  if (kind == "kl") {
    report.result = kl_gaussian(mu0, mu1);
    if (args.check) report.oracle_note = "no geodesic oracle for kl";
  } else if (kind == "wkl") {
    report.result = wkl(mu0, mu1);
    if (args.check) report.oracle = divergence_quadrature(wkl_path(mu0, mu1), mu1, args.nodes);
  } else if (kind == "kwkl") {
    report.result = kwkl(mu0, mu1, args.lambda);
    if (args.check) report.oracle = divergence_quadrature(kw_path(mu0, mu1, args.lambda), mu1, args.nodes);
  } else if (kind == "coulomb") {
    report.result = coulomb_1d(mu0, mu1);
    if (args.check) report.oracle_note = "no geodesic oracle for coulomb";
  } else {
    throw ConfigError("unknown divergence '" + kind + "' (expected kl, wkl, kwkl, kw-same, stein, coulomb)");
  }
  return report;
}

std::string format_report(const DivergenceReport& report, bool diagnostics) {
  std::ostringstream os;
  os << "kind " << report.kind << '\n';
  os << "value " << format_double(report.result.value) << '\n';
  if (report.result.clipped) os << "clipped 1\n";
  if (report.oracle) {
    const double diff = std::abs(report.result.value - *report.oracle);
    os << "oracle " << format_double(*report.oracle) << '\n';
    os << "abs_diff " << format_double(diff) << '\n';
    os << "rel_diff " << format_double(diff / std::max(1.0, std::abs(*report.oracle))) << '\n';
  } else if (!report.oracle_note.empty()) {
    os << "oracle none (" << report.oracle_note << ")\n";
  }
  for (const std::string& w : report.result.warnings) os << "warning " << w << '\n';
  if (diagnostics) {
    for (const auto& [name, m] : report.result.diagnostics) os << "diag " << name << " " << format_matrix(m) << '\n';
  }
  return os.str();
}

CsvTable cmd_divergence_ball(const BallConfig& cfg) {
  if (cfg.kind != "kl" && cfg.kind != "wkl" && cfg.kind != "kwkl" && cfg.kind != "coulomb") {
    throw ConfigError("divergence-ball supports kl, wkl, kwkl, coulomb; got '" + cfg.kind + "'");
  }
  if (!(cfg.center_sigma > 0.0)) throw ConfigError("center sigma must be positive");
  if (cfg.m_points < 1 || cfg.sigma_points < 1) throw ConfigError("grid needs at least one point per axis");
  if (!(cfg.m_max >= cfg.m_min) || !(cfg.sigma_max >= cfg.sigma_min)) throw ConfigError("grid bounds are reversed");
  if (cfg.kind == "kwkl" && !(cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");

  auto axis = [](double lo, double hi, int count, int k) { return count == 1 ? lo : lo + (hi - lo) * k / (count - 1); };
  const EllipticDist center = EllipticDist::gaussian(Vector::Constant(1, cfg.center_mean),
                                                     Matrix::Constant(1, 1, cfg.center_sigma * cfg.center_sigma));
  CsvTable table({"m", "sigma", "value", "inside", "valid"});
  table.add_meta("command", "divergence-ball");
  table.add_meta("revision", build_revision());
  table.add_meta("kind", cfg.kind);
  table.add_meta("center", "m=" + format_double(cfg.center_mean) + " sigma=" + format_double(cfg.center_sigma));
  table.add_meta("level", format_double(cfg.level));
  if (cfg.kind == "kwkl") table.add_meta("lambda", format_double(cfg.lambda));
  table.add_meta("direction", "D(center | N(m, sigma^2))");

  for (int i = 0; i < cfg.sigma_points; ++i) {
    const double sigma = axis(cfg.sigma_min, cfg.sigma_max, cfg.sigma_points, i);
    for (int j = 0; j < cfg.m_points; ++j) {
      const double m = axis(cfg.m_min, cfg.m_max, cfg.m_points, j);
      double value = std::nan("");
      try {
        const EllipticDist cell = EllipticDist::gaussian(Vector::Constant(1, m), Matrix::Constant(1, 1, sigma * sigma));
        if (cfg.kind == "kl") value = kl_gaussian(center, cell).value;
        if (cfg.kind == "wkl") value = wkl(center, cell).value;
        if (cfg.kind == "kwkl") value = kwkl(center, cell, cfg.lambda).value;
        if (cfg.kind == "coulomb") value = coulomb_1d(center, cell).value;
      } catch (const Error&) {
        value = std::nan("");
      }
      const bool valid = std::isfinite(value);
      table.add_row({m, sigma, value, valid && value <= cfg.level ? 1.0 : 0.0, valid ? 1.0 : 0.0});
    }
  }
  return table;
}

}  // namespace statediv::cli
