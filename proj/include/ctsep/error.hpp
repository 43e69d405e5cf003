#pragma once

#include <stdexcept>
#include <string>

namespace ctsep {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Format,
  Solver,
};

/// Exception type thrown by every ctsep routine. The kind is what the C API
/// maps onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace ctsep
