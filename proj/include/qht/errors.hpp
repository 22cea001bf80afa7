#pragma once

#include <stdexcept>
#include <string>

namespace qht {

// Failure taxonomy. The CLI maps kinds onto its exit-code contract:
// input/validation -> 2, numerical -> 3, budget refusal -> 4.
enum class ErrorKind {
  NotAState,
  NonHermitian,
  RankDeficient,
  SingularMatrix,
  UnsupportedOrder,
  EmptySequence,
  TooManyTypes,
  OverlappingSets,
  InvalidThresholds,
  DimensionBudget,
  ConvergenceFailure,
  BadInput,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotAState: return "NotAState";
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::TooManyTypes: return "TooManyTypes";
    case ErrorKind::OverlappingSets: return "OverlappingSets";
    case ErrorKind::InvalidThresholds: return "InvalidThresholds";
    case ErrorKind::DimensionBudget: return "DimensionBudget";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::BadInput: return "BadInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // 2 = input error, 3 = numerical error, 4 = budget refusal
  int exit_code() const {
    switch (kind_) {
      case ErrorKind::ConvergenceFailure: return 3;
      case ErrorKind::TooManyTypes:
      case ErrorKind::DimensionBudget: return 4;
      default: return 2;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace qht
