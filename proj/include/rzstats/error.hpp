#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rzstats {

enum class ErrorCode {
  domain_error,
  parse_error,
  validation_error,
  format_error,
  range_error,
  geometry_error,
  degenerate_fit,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::format_error: return "format_error";
    case ErrorCode::range_error: return "range_error";
    case ErrorCode::geometry_error: return "geometry_error";
    case ErrorCode::degenerate_fit: return "degenerate_fit";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rzstats
