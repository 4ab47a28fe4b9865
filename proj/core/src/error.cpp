#include "topovox/error.hpp"

namespace topovox {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kInvalidParameter: return "invalid parameter";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kTooShort: return "too short";
    case ErrorCode::kDegenerateSignal: return "degenerate signal";
    case ErrorCode::kDegenerateGeometry: return "degenerate geometry";
    case ErrorCode::kInvalidFiltration: return "invalid filtration";
    case ErrorCode::kDegenerateTarget: return "degenerate target";
    case ErrorCode::kNetwork: return "network error";
    case ErrorCode::kIntegrity: return "integrity error";
    case ErrorCode::kPartialRow: return "partial row";
    case ErrorCode::kMissingStage: return "missing stage";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace topovox
