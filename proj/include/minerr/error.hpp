#pragma once

#include <stdexcept>
#include <string>

namespace minerr {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NumericalOverflow,
  DegenerateDirection,
  InvalidStep,
  StabilityViolation,
  NeedsLongerSpectrum,
  NotAvailable,
  Io,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above; the C
// layer maps them one-to-one onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace minerr
