#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weakpde {

enum class ErrorCode {
  InvalidDimension,
  DegenerateAxis,
  EmptyResult,
  MalformedHeader,
  TruncatedPayload,
  UnsupportedVersion,
  UnknownExpression,
  OutOfRange,
  DomainTooLarge,
  TooFewNodes,
  UnknownSystem,
  NonFiniteInput,
  ShapeMismatch,
  InvalidWeight,
  BlowUp,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace weakpde
