#include "weakpde/error.hpp"

namespace weakpde {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::DegenerateAxis: return "degenerate-axis";
    case ErrorCode::EmptyResult: return "empty-result";
    case ErrorCode::MalformedHeader: return "malformed-header";
    case ErrorCode::TruncatedPayload: return "truncated-payload";
    case ErrorCode::UnsupportedVersion: return "unsupported-version";
    case ErrorCode::UnknownExpression: return "unknown-expression";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::DomainTooLarge: return "domain-too-large";
    case ErrorCode::TooFewNodes: return "too-few-nodes";
    case ErrorCode::UnknownSystem: return "unknown-system";
    case ErrorCode::NonFiniteInput: return "non-finite-input";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::InvalidWeight: return "invalid-weight";
    case ErrorCode::BlowUp: return "blow-up";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace weakpde
