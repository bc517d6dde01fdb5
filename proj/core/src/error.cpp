#include "cpkdim/error.hpp"

namespace cpkdim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::IndeterminatePoint: return "IndeterminatePoint";
    case ErrorCode::ChartDegenerate: return "ChartDegenerate";
    case ErrorCode::DegenerateFiber: return "DegenerateFiber";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::ExceptionalSeed: return "ExceptionalSeed";
    case ErrorCode::CriticalOrbit: return "CriticalOrbit";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::EmptyBall: return "EmptyBall";
    case ErrorCode::EmptyDynamicalBall: return "EmptyDynamicalBall";
    case ErrorCode::QuadratureUnstable: return "QuadratureUnstable";
    case ErrorCode::NotBounded: return "NotBounded";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::ClosureViolation: return "ClosureViolation";
    case ErrorCode::SingularDiagonal: return "SingularDiagonal";
    case ErrorCode::BandViolation: return "BandViolation";
    case ErrorCode::AdaptednessFailure: return "AdaptednessFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidMap: return "InvalidMap";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cpkdim
