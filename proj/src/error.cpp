#include "proxeig/error.hpp"

namespace proxeig {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kNullSpaceInput: return "null-space-input";
    case ErrorKind::kConstructionFailure: return "construction-failure";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kSolverFailure: return "solver-failure";
    case ErrorKind::kBacktrackExhausted: return "backtrack-exhausted";
    case ErrorKind::kRuleViolation: return "rule-violation";
    case ErrorKind::kDegenerateOutput: return "degenerate-output";
    case ErrorKind::kRestartFailure: return "restart-failure";
    case ErrorKind::kConfig: return "config-error";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace proxeig
