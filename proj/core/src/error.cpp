#include "feigdim/error.hpp"

namespace feigdim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnsupportedCombinatorics: return "UnsupportedCombinatorics";
    case ErrorCode::DegenerateJacobian: return "DegenerateJacobian";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoCriticalPoint: return "NoCriticalPoint";
    case ErrorCode::IterateEscaped: return "IterateEscaped";
    case ErrorCode::OrbitEscaped: return "OrbitEscaped";
    case ErrorCode::OutOfNeighborhood: return "OutOfNeighborhood";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::BranchNotMonotone: return "BranchNotMonotone";
    case ErrorCode::OrbitIndexOverflow: return "OrbitIndexOverflow";
    case ErrorCode::IndexOutOfAlphabet: return "IndexOutOfAlphabet";
    case ErrorCode::NoContraction: return "NoContraction";
    case ErrorCode::RatioNotContracting: return "RatioNotContracting";
    case ErrorCode::PowerIterationStall: return "PowerIterationStall";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::TailTooFat: return "TailTooFat";
    case ErrorCode::EigenvectorSignFailure: return "EigenvectorSignFailure";
    case ErrorCode::LambdaDegenerate: return "LambdaDegenerate";
    case ErrorCode::BranchCutCrossed: return "BranchCutCrossed";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace feigdim
