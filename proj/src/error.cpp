#include "deobs/error.hpp"

namespace deobs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCorruptDiff: return "CorruptDiff";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kOutOfOrderSet: return "OutOfOrderSet";
    case ErrorCode::kInconsistentState: return "InconsistentState";
    case ErrorCode::kEvicted: return "Evicted";
    case ErrorCode::kNotYetWritten: return "NotYetWritten";
    case ErrorCode::kCapacityExhausted: return "CapacityExhausted";
    case ErrorCode::kEpisodeDiscipline: return "EpisodeDiscipline";
    case ErrorCode::kEmptyBuffer: return "EmptyBuffer";
    case ErrorCode::kNoValidTransitions: return "NoValidTransitions";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace deobs
