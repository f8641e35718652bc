#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oscmate {

enum class ErrorCode {
  InvalidGrid,
  NonFinite,
  InvalidArgument,
  NotFrenet,
  OutOfDomain,
  Irregular,
  NonPositiveKappa,
  DegenerateIndicatrix,
  ZeroSpeedFrame,
  DegenerateMate,
  ZeroDenominator,
  NegativeKappaRecovered,
  InsufficientSamples,
  UnknownName,
  InvalidParams,
  SyntaxError,
  UnknownFunction,
  DomainFault,
  IoError,
  ArgumentError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `code()` is stable and machine readable;
/// the CLI prints it as `error[CODE]: what()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace oscmate
