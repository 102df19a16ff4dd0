#include "freemult/errors.hpp"

namespace freemult {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AtomicHasNoDensity: return "AtomicHasNoDensity";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::EmptyVSet: return "EmptyVSet";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::GridUnderflow: return "GridUnderflow";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace freemult
