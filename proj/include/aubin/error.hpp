#pragma once

#include <stdexcept>
#include <string>

namespace aubin {

enum class ErrorCode {
  Syntax,
  Index,
  Exponent,
  Domain,
  DimensionMismatch,
  MfcqViolated,
  InfeasiblePoint,
  NotStationary,
  UnsupportedConePattern,
  ProbeCapability,
  Input,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; the code selects the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with the byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, const std::string& message)
      : Error(code, message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace aubin
