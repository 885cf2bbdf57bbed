#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nbbook {

enum class ErrorKind {
  MalformedJson,
  UnsupportedFormat,
  MalformedConfig,
  InvalidCategoryCode,
  DuplicatePurpose,
  InvalidTiling,
  AnchorOutOfBounds,
  UnknownCell,
  DuplicateAnnotationId,
  MalformedStoreFile,
  InvalidViewState,
  UnknownFormat,
  MalformedSnapshot,
  VersionMismatch,
};

constexpr std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedJson: return "MalformedJson";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::MalformedConfig: return "MalformedConfig";
    case ErrorKind::InvalidCategoryCode: return "InvalidCategoryCode";
    case ErrorKind::DuplicatePurpose: return "DuplicatePurpose";
    case ErrorKind::InvalidTiling: return "InvalidTiling";
    case ErrorKind::AnchorOutOfBounds: return "AnchorOutOfBounds";
    case ErrorKind::UnknownCell: return "UnknownCell";
    case ErrorKind::DuplicateAnnotationId: return "DuplicateAnnotationId";
    case ErrorKind::MalformedStoreFile: return "MalformedStoreFile";
    case ErrorKind::InvalidViewState: return "InvalidViewState";
    case ErrorKind::UnknownFormat: return "UnknownFormat";
    case ErrorKind::MalformedSnapshot: return "MalformedSnapshot";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the named kinds above so
/// callers (the CLI, the HTTP layer) can map it to exit codes and status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace nbbook
