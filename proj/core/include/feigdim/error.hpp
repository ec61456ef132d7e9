#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace feigdim {

enum class ErrorCode {
  // renorm_fixedpoint
  NoConvergence,
  UnsupportedCombinatorics,
  DegenerateJacobian,
  SchemaMismatch,
  CorruptFile,
  DomainError,
  // unimodal_system
  NoCriticalPoint,
  IterateEscaped,
  OrbitEscaped,
  OutOfNeighborhood,
  InvariantViolation,
  // presentation_ifs
  BranchNotMonotone,
  OrbitIndexOverflow,
  IndexOutOfAlphabet,
  NoContraction,
  RatioNotContracting,
  // dimension_engine
  PowerIterationStall,
  RootNotBracketed,
  TailTooFat,
  EigenvectorSignFailure,
  // parabolic_poincare
  LambdaDegenerate,
  BranchCutCrossed,
  // cli
  UsageError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// NoConvergence also reports the last residual the solver reached.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double last_residual)
      : Error(ErrorCode::NoConvergence, what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace feigdim
