#include "statediv/cli/parse.hpp"

#include <charconv>
#include <sstream>

#include "statediv/numfmt.hpp"

namespace statediv::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("expected a number, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) out.push_back(parse_number(part));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

Vector parse_vector(const std::string& text) {
  const std::vector<double> values = parse_list(text);
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const std::string& row : split(text, ';')) rows.push_back(parse_list(row));
  if (rows.empty()) throw ConfigError("empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw ConfigError("matrix rows differ in length: '" + text + "'");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

EllipticFamily parse_family(const std::string& text) {
  const std::string t = trim(text);
  if (t == "gaussian") return EllipticFamily::gaussian();
  try {
    if (t.rfind("student:", 0) == 0) return EllipticFamily::student_t(parse_number(t.substr(8)));
    if (t.rfind("kappa:", 0) == 0) return EllipticFamily::custom_kappa(parse_number(t.substr(6)));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown family '" + text + "' (expected gaussian, student:<dof> or kappa:<k>)");
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
  return out;
}

std::string format_vector(const Vector& v) { return format_list(std::vector<double>(v.data(), v.data() + v.size())); }

std::string format_matrix(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    if (i) out += ";";
    for (Index j = 0; j < m.cols(); ++j) out += (j ? "," : "") + format_double(m(i, j));
  }
  return out;
}

}  // namespace statediv::cli
