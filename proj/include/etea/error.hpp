#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace etea {

// Every failure the library reports. The numeric values double as CLI exit
// codes, so they are stable; 0 and 2 are reserved for success and usage.
enum class ErrorCode : int {
  IoError = 1,
  BadMagic = 3,
  BadChecksum = 4,
  BadPadding = 5,
  LengthMismatch = 6,
  Malformed = 7,
  NoMagic = 8,
  CorruptTrailer = 9,
  AlreadyEmbedded = 10,
  EmptyCarrier = 11,
  ConnectFailed = 12,
  Rejected = 13,
  BindFailed = 14,
  BadKeyFile = 15,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadChecksum: return "BadChecksum";
    case ErrorCode::BadPadding: return "BadPadding";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::NoMagic: return "NoMagic";
    case ErrorCode::CorruptTrailer: return "CorruptTrailer";
    case ErrorCode::AlreadyEmbedded: return "AlreadyEmbedded";
    case ErrorCode::EmptyCarrier: return "EmptyCarrier";
    case ErrorCode::ConnectFailed: return "ConnectFailed";
    case ErrorCode::Rejected: return "Rejected";
    case ErrorCode::BindFailed: return "BindFailed";
    case ErrorCode::BadKeyFile: return "BadKeyFile";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace etea
