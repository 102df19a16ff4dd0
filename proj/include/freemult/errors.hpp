#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freemult {

enum class ErrorCode {
  AtomicHasNoDensity,
  NonIntegrable,
  DomainError,
  BracketFailure,
  EmptyVSet,
  DegenerateInput,
  HypothesisViolated,
  GridUnderflow,
  IndexOutOfRange,
  WindowTooNarrow,
  ParseError,
  InvariantViolation,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// CLI maps them onto exit codes (parse/invariant -> 2, everything else -> 3).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace freemult
