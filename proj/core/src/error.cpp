#include "chm/error.hpp"

namespace chm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotInRegion: return "NotInRegion";
    case ErrorKind::NoCriticalPoints: return "NoCriticalPoints";
    case ErrorKind::PoleError: return "PoleError";
    case ErrorKind::RootBracketFailure: return "RootBracketFailure";
    case ErrorKind::StencilLeavesRegion: return "StencilLeavesRegion";
    case ErrorKind::DegenerateChart: return "DegenerateChart";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::KernelDimensionMismatch: return "KernelDimensionMismatch";
    case ErrorKind::MatchingAmbiguity: return "MatchingAmbiguity";
    case ErrorKind::AmplitudeTooLarge: return "AmplitudeTooLarge";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::AmplitudeTooLarge:
      return 2;
    case ErrorKind::NotInRegion:
    case ErrorKind::NoCriticalPoints:
    case ErrorKind::PoleError:
      return 3;
    case ErrorKind::RootBracketFailure:
    case ErrorKind::StencilLeavesRegion:
    case ErrorKind::DegenerateChart:
    case ErrorKind::NewtonDivergence:
    case ErrorKind::TruncationTooSmall:
    case ErrorKind::KernelDimensionMismatch:
    case ErrorKind::MatchingAmbiguity:
      return 4;
    case ErrorKind::Internal:
      return 5;
  }
  return 5;
}

}  // namespace chm
