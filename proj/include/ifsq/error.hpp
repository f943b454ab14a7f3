#pragma once

#include <stdexcept>
#include <string>

namespace ifsq {

enum class ErrorKind {
  invalid_input,
  unsupported_input,
  resource,
  address_failure,
  invalid_grid,
  invalid_scale,
  numerical,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::unsupported_input: return "unsupported-input";
    case ErrorKind::resource: return "resource";
    case ErrorKind::address_failure: return "address-failure";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::invalid_scale: return "invalid-scale";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` carries the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind),
        message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

namespace detail {

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

inline void require_input(bool ok, const std::string& what) {
  require(ok, ErrorKind::invalid_input, what);
}

}  // namespace detail
}  // namespace ifsq
