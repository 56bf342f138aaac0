#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lakelet {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidKey,
  kDuplicateObject,
  kIoError,
  kDanglingRef,
  kCommitConflict,
  kUnknownVersion,
  kCorruptObject,
  kMissingObject,
  kAlreadyRegistered,
  kCycleDetected,
  kUnknownDataset,
  kNonNumericSplitColumn,
  kImportAborted,
  kParseError,
  kInvalidSpec,
  kDanglingPort,
  kUnknownProcessorKind,
  kInvalidWeights,
  kFlowFailed,
  kUnknownRecord,
  kEmptyDataset,
  kInferFailed,
  kReadAborted,
  kPlanError,
  kNotALake,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure surfaced by the library. The code is the
/// stable identity; the message is for humans.
class LakeError : public std::runtime_error {
 public:
  LakeError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Strict-mode read violation, carrying the offending file and 1-based line.
class ReadAbortedError : public LakeError {
 public:
  ReadAbortedError(std::string file, uint64_t line, const std::string& reason);

  const std::string& file() const noexcept { return file_; }
  uint64_t line() const noexcept { return line_; }

 private:
  std::string file_;
  uint64_t line_;
};

[[noreturn]] void throw_error(ErrorCode code, const std::string& message);

}  // namespace lakelet
