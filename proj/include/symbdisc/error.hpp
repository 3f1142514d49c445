#pragma once

#include <stdexcept>
#include <string>

namespace symbdisc {

enum class ErrorCode {
  // usage
  UsageError,
  // data
  EmptyInput,
  OverlappingSubintervals,
  WeightSumOutOfTolerance,
  DomainError,
  GridIncompatible,
  NotAligned,
  EmptyGroup,
  GridMismatch,
  AsymmetricGrid,
  MissingLabels,
  SingleGroup,
  InvalidParameters,
  NoRows,
  AllUnitsDropped,
  ParseError,
  // solver
  DegenerateWithin,
  NumericalFailure,
  ConvergenceFailure,
};

// Coarse category used by the CLI to pick an exit code.
enum class ErrorCategory { Usage = 2, Data = 3, Solver = 4 };

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OverlappingSubintervals: return "OverlappingSubintervals";
    case ErrorCode::WeightSumOutOfTolerance: return "WeightSumOutOfTolerance";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::GridIncompatible: return "GridIncompatible";
    case ErrorCode::NotAligned: return "NotAligned";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::AsymmetricGrid: return "AsymmetricGrid";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NoRows: return "NoRows";
    case ErrorCode::AllUnitsDropped: return "AllUnitsDropped";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DegenerateWithin: return "DegenerateWithin";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
  }
  return "Unknown";
}

inline ErrorCategory error_category(ErrorCode c) {
  switch (c) {
    case ErrorCode::UsageError:
      return ErrorCategory::Usage;
    case ErrorCode::DegenerateWithin:
    case ErrorCode::NumericalFailure:
    case ErrorCode::ConvergenceFailure:
      return ErrorCategory::Solver;
    default:
      return ErrorCategory::Data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorCategory category() const { return error_category(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace symbdisc
