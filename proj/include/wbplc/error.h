#ifndef WBPLC_ERROR_H_
#define WBPLC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace wbplc {

enum class ErrorCode {
  kInvalidSoftbit,
  kTruncatedStream,
  kConfigMismatch,
  kLengthMismatch,
  kNotCanonical,
  kNotEmbedded,
  kEmptyStream,
  kSequenceGap,
  kInvalidParams,
  kLayoutMismatch,
  kInvalidConfig,
  kIo,
  kInvariantViolation,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported by throwing Error. The code lets callers
// branch (e.g. fall back to repetition on kNotEmbedded) without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wbplc

#endif  // WBPLC_ERROR_H_
