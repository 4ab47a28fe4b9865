#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topovox {

enum class ErrorCode {
  kFormat,
  kUnsupportedFormat,
  kInvalidParameter,
  kEmptyInput,
  kTooShort,
  kDegenerateSignal,
  kDegenerateGeometry,
  kInvalidFiltration,
  kDegenerateTarget,
  kNetwork,
  kIntegrity,
  kPartialRow,
  kMissingStage,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for every recoverable failure in the library.
/// The code tells callers (and the CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// Network failures are the only ones worth retrying.
  bool retryable() const noexcept { return code_ == ErrorCode::kNetwork; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace topovox
