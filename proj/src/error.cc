#include "wbplc/error.h"

namespace wbplc {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSoftbit: return "InvalidSoftbit";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNotCanonical: return "NotCanonical";
    case ErrorCode::kNotEmbedded: return "NotEmbedded";
    case ErrorCode::kEmptyStream: return "EmptyStream";
    case ErrorCode::kSequenceGap: return "SequenceGap";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kLayoutMismatch: return "LayoutMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace wbplc
