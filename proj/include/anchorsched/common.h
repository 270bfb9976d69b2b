#ifndef ANCHORSCHED_COMMON_H_
#define ANCHORSCHED_COMMON_H_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anchorsched {

// Global comparison tolerance for schedule and path-length predicates. All
// generated data are small integers or simple fractions.
inline constexpr double kEps = 1e-6;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Marks a pair (i, j) that is not in the reachability relation.
inline constexpr double kUnreachable = -kInfinity;

// Vector indexed by job: entry k holds the value of job k + 1.
using JobVector = std::vector<double>;

enum class ErrorCode {
  kCycleDetected,
  kInvalidGraph,
  kInvalidArgument,
  kDeadlineInfeasible,
  kBudgetOutOfRange,
  kEmptyScenarioList,
  kEnumerationTooLarge,
  kNotASchedule,
  kInfeasibleAnchoredSet,
  kInstanceTooLarge,
  kNumericalFailure,
  kIoError,
  kParseError,
  kUnsupportedUncertainty,
  kUnsupportedInstance,
  kNonIntegralVertex,
  kNotCritical,
  kMissingCompanionDeviation,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kInvalidGraph: return "InvalidGraph";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDeadlineInfeasible: return "DeadlineInfeasible";
    case ErrorCode::kBudgetOutOfRange: return "BudgetOutOfRange";
    case ErrorCode::kEmptyScenarioList: return "EmptyScenarioList";
    case ErrorCode::kEnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::kNotASchedule: return "NotASchedule";
    case ErrorCode::kInfeasibleAnchoredSet: return "InfeasibleAnchoredSet";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedUncertainty: return "UnsupportedUncertainty";
    case ErrorCode::kUnsupportedInstance: return "UnsupportedInstance";
    case ErrorCode::kNonIntegralVertex: return "NonIntegralVertex";
    case ErrorCode::kNotCritical: return "NotCritical";
    case ErrorCode::kMissingCompanionDeviation:
      return "MissingCompanionDeviation";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline bool ApproxLessEqual(double a, double b, double tol = kEps) {
  return a <= b + tol;
}

inline bool ApproxEqual(double a, double b, double tol = kEps) {
  return std::abs(a - b) <= tol;
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_COMMON_H_
