#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace palis {

/// Raised when a value would violate a domain-type invariant.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments to an API call or CLI subcommand (wrong sizes, unknown enum names).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FormatErrorKind {
  Io,
  Magic,
  Header,
  Syntax,
  IndexOutOfRange,
  Truncated,
  TrailingData,
  Invariant,
};

std::string_view to_string(FormatErrorKind kind);

/// Raised by the file loaders. `what()` carries a positional message
/// (byte offset or JSON path).
class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace palis
