#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cbcw {

// Mirrors the status codes of the C API (cbcw.h).
enum class ErrorCode {
  InvalidArgument = 1,
  Parse = 2,
  Io = 3,
  Numeric = 4,
  EmptyModel = 5,
  Unreliable = 6,
  Internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace cbcw
