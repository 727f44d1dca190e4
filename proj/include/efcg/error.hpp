#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace efcg {

enum class ErrorCode {
  InvalidConstraint,
  InvalidAttribute,
  NoHardConstraints,
  EmptyInput,
  OutOfRange,
  DimensionMismatch,
  ZeroNorm,
  SpaceMismatch,
  UnknownId,
  UnknownSeed,
  MissingVector,
  PoolTooSmall,
  EmptySet,
  EmptySoftList,
  CountMismatch,
  MalformedScore,
  GeneratorError,
  JudgeError,
  DegenerateSet,
  PositionOutOfRange,
  ClientError,
  EmptyText,
  NoAttributesFound,
  ParseError,
  ConfigError,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Every library failure is reported through this type; `code()` is the
// machine-readable kind, `what()` carries the field-level message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace efcg
