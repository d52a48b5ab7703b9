#pragma once

#include <string>

namespace statediv {

/// Shortest decimal text that parses back to exactly `x`; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

}  // namespace statediv
