#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpms {

enum class ErrorCode {
  InvalidArgument,
  InvalidSpec,
  CapExceeded,
  NonFinite,
  InvalidThickness,
  GridMismatch,
  CapFailure,
  TargetUnreachable,
  NonMonotone,
  ResolutionTooCoarse,
  EnvelopeExceeded,
  NotWatertight,
  Malformed,
  SinkError,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidThickness: return "InvalidThickness";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::CapFailure: return "CapFailure";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::EnvelopeExceeded: return "EnvelopeExceeded";
    case ErrorCode::NotWatertight: return "NotWatertight";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::SinkError: return "SinkError";
  }
  return "Unknown";
}

/// Every failure raised by the toolkit carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tpms
