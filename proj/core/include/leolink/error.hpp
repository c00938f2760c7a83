#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leolink {

enum class ErrorCode {
  InvalidArgument,
  NonConvergent,
  UnsupportedOrder,
  OutOfPass,
  SlotTooLong,
  ZeroCrossingRate,
  IndexOutOfRange,
  DimensionMismatch,
  ZeroPower,
  ParseError,
  ValidationError,
  UnknownKey,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// command-line front end can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by malformed or out-of-range input rather
  /// than by the numerics.
  bool is_input_error() const noexcept;

 private:
  ErrorCode code_;
};

namespace detail {

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace detail
}  // namespace leolink
