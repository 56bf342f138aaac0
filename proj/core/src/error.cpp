#include "lakelet/error.hpp"

namespace lakelet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidKey: return "InvalidKey";
    case ErrorCode::kDuplicateObject: return "DuplicateObject";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDanglingRef: return "DanglingRef";
    case ErrorCode::kCommitConflict: return "CommitConflict";
    case ErrorCode::kUnknownVersion: return "UnknownVersion";
    case ErrorCode::kCorruptObject: return "CorruptObject";
    case ErrorCode::kMissingObject: return "MissingObject";
    case ErrorCode::kAlreadyRegistered: return "AlreadyRegistered";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kUnknownDataset: return "UnknownDataset";
    case ErrorCode::kNonNumericSplitColumn: return "NonNumericSplitColumn";
    case ErrorCode::kImportAborted: return "ImportAborted";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kDanglingPort: return "DanglingPort";
    case ErrorCode::kUnknownProcessorKind: return "UnknownProcessorKind";
    case ErrorCode::kInvalidWeights: return "InvalidWeights";
    case ErrorCode::kFlowFailed: return "FlowFailed";
    case ErrorCode::kUnknownRecord: return "UnknownRecord";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kInferFailed: return "InferFailed";
    case ErrorCode::kReadAborted: return "ReadAborted";
    case ErrorCode::kPlanError: return "PlanError";
    case ErrorCode::kNotALake: return "NotALake";
  }
  return "Unknown";
}

ReadAbortedError::ReadAbortedError(std::string file, uint64_t line,
                                   const std::string& reason)
    : LakeError(ErrorCode::kReadAborted,
                file + ":" + std::to_string(line) + ": " + reason),
      file_(std::move(file)),
      line_(line) {}

void throw_error(ErrorCode code, const std::string& message) {
  throw LakeError(code, message);
}

}  // namespace lakelet
