#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgbench {

enum class ErrorCode {
  EmptyInput,
  UnknownLabel,
  DuplicateLabel,
  InvalidId,
  OverlappingSplits,
  MalformedLine,
  BadMagic,
  LengthMismatch,
  NonFiniteValue,
  EmptyReport,
  Io,
  UndeclaredRelation,
  InvalidSchema,
  EmptyResult,
  InfeasibleSplit,
  InvalidConfig,
  DimMismatch,
  UnknownModel,
  UnknownPreset,
  InvalidK,
  ExhaustedCandidates,
  NonFiniteGradient,
  EmptyTestSet,
  UnseenEntity,
  InvariantViolated,
};

std::string_view to_string(ErrorCode code);

// Contract failures raised by every module. The code is stable and tested;
// the message is free-form diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// MalformedLine carrying the 1-based line number (and file, when known).
class MalformedLineError : public Error {
 public:
  MalformedLineError(std::size_t line, const std::string& message, const std::string& file = {})
      : Error(ErrorCode::MalformedLine, (file.empty() ? "" : file + ": ") + "line " + std::to_string(line) + ": " + message),
        line_(line),
        detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

}  // namespace kgbench
