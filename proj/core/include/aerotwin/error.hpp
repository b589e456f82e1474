#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aerotwin {

/// Machine-readable failure categories. The CLI prints these verbatim.
enum class ErrorCode {
  InvalidConfig,
  Validation,
  Unreachable,
  LimitViolation,
  MalformedMessage,
  EmptyWindow,
  SinkClosed,
  Diverged,
  Io,
  CorruptRecord,
  PortInUse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::Validation: return "VALIDATION";
    case ErrorCode::Unreachable: return "UNREACHABLE";
    case ErrorCode::LimitViolation: return "LIMIT_VIOLATION";
    case ErrorCode::MalformedMessage: return "MALFORMED_MESSAGE";
    case ErrorCode::EmptyWindow: return "EMPTY_WINDOW";
    case ErrorCode::SinkClosed: return "SINK_CLOSED";
    case ErrorCode::Diverged: return "DIVERGED";
    case ErrorCode::Io: return "IO";
    case ErrorCode::CorruptRecord: return "CORRUPT_RECORD";
    case ErrorCode::PortInUse: return "PORT_IN_USE";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aerotwin
