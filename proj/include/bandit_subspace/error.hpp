#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bandit_subspace {

enum class ErrorCode {
  InvalidMatrix,
  SingularLog,
  DimMismatch,
  NormViolation,
  InfNormViolation,
  NotOrthonormal,
  BadIndex,
  BadProbabilities,
  BadParams,
  BadBasis,
  InfeasibleBasis,
  OddBudget,
  BadAlpha,
  ZeroProbability,
  InfeasibleK,
  BudgetNotTwo,
  AlphaTooLarge,
  EmptySample,
  NotInHull,
  NonTermination,
  MissingBasis,
  BadConfig,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::SingularLog: return "SingularLog";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NormViolation: return "NormViolation";
    case ErrorCode::InfNormViolation: return "InfNormViolation";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BadProbabilities: return "BadProbabilities";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::BadBasis: return "BadBasis";
    case ErrorCode::InfeasibleBasis: return "InfeasibleBasis";
    case ErrorCode::OddBudget: return "OddBudget";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::InfeasibleK: return "InfeasibleK";
    case ErrorCode::BudgetNotTwo: return "BudgetNotTwo";
    case ErrorCode::AlphaTooLarge: return "AlphaTooLarge";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NotInHull: return "NotInHull";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::MissingBasis: return "MissingBasis";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `code()` names
/// the violated contract, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Numeric payload for violations that report a measured value (e.g. the
// offending squared norm).
class ValueError : public Error {
 public:
  ValueError(ErrorCode code, double value, const std::string& detail)
      : Error(code, detail), value_(value) {}

  double value() const noexcept { return value_; }

 private:
  double value_;
};

}  // namespace bandit_subspace
