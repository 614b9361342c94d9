#pragma once

#include <stdexcept>
#include <string>

namespace advlcd {

enum class ErrorCode {
  InapplicableFlip,
  ParseError,
  SchemaError,
  IoError,
  DidNotConverge,
  BudgetExceedsPairs,
  NoConnectedPair,
  DimensionMismatch,
  DegenerateData,
  DegenerateLabels,
  QueryBudgetExhausted,
  InvalidConfig,
  TooFewBlocks,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// C API can translate it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace advlcd
