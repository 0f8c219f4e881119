#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace proxeig {

enum class ErrorKind {
  kInvalidInput,
  kNullSpaceInput,
  kConstructionFailure,
  kUnsupported,
  kSolverFailure,
  kBacktrackExhausted,
  kRuleViolation,
  kDegenerateOutput,
  kRestartFailure,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it to a stable error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace proxeig
