#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chm {

/// Failure categories raised by the numerics. Each one maps onto a CLI exit code.
enum class ErrorKind {
  InvalidInput,
  NotInRegion,
  NoCriticalPoints,
  PoleError,
  RootBracketFailure,
  StencilLeavesRegion,
  DegenerateChart,
  NewtonDivergence,
  TruncationTooSmall,
  KernelDimensionMismatch,
  MatchingAmbiguity,
  AmplitudeTooLarge,
  Internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// 0 success, 2 invalid input, 3 out-of-region, 4 numerical degeneracy, 5 internal.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace chm
