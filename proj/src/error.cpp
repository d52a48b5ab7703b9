#include "statediv/error.hpp"

namespace statediv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotSpd: return "NotSpd";
    case ErrorCode::NonPositiveSpectrum: return "NonPositiveSpectrum";
    case ErrorCode::InvalidFamily: return "InvalidFamily";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
    case ErrorCode::NonCommutingScales: return "NonCommutingScales";
    case ErrorCode::GeodesicBlowup: return "GeodesicBlowup";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::EndpointMismatch: return "EndpointMismatch";
    case ErrorCode::SingularNoise: return "SingularNoise";
    case ErrorCode::RankDeficientB: return "RankDeficientB";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnstableClosedLoop: return "UnstableClosedLoop";
    case ErrorCode::SingularMassMatrix: return "SingularMassMatrix";
  }
  return "Unknown";
}

}  // namespace statediv
