#pragma once

// Text formats accepted on the command line:
//   vector  "1,2.5,-3"
//   matrix  "1,0;0,2"   (rows separated by ';')
//   family  "gaussian", "student:<dof>", "kappa:<k>"

#include <stdexcept>
#include <string>
#include <vector>

#include "statediv/elliptic.hpp"

namespace statediv::cli {

/// Malformed user input; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text);
std::vector<double> parse_list(const std::string& text);
Vector parse_vector(const std::string& text);
Matrix parse_matrix(const std::string& text);
EllipticFamily parse_family(const std::string& text);

/// Inverses of the parsers above, using shortest round-trip numbers.
std::string format_list(const std::vector<double>& values);
std::string format_vector(const Vector& v);
std::string format_matrix(const Matrix& m);

}  // namespace statediv::cli
