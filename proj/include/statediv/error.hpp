#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace statediv {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  NotSpd,
  NonPositiveSpectrum,
  InvalidFamily,
  DegenerateScale,
  DegenerateCovariance,
  FamilyMismatch,
  NonCommutingScales,
  GeodesicBlowup,
  UnsupportedDimension,
  EndpointMismatch,
  SingularNoise,
  RankDeficientB,
  NoConvergence,
  UnstableClosedLoop,
  SingularMassMatrix,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Solver failures (as opposed to bad inputs).
  bool is_solver_failure() const noexcept {
    return code_ == ErrorCode::NoConvergence || code_ == ErrorCode::UnstableClosedLoop;
  }

 private:
  ErrorCode code_;
};

}  // namespace statediv
