#pragma once

#include <stdexcept>
#include <string>

namespace p2pbandit {

/// Caller handed an operation a value outside its domain (non-finite input,
/// dimension mismatch, action not in the offered set).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad run configuration. `line()` is 0 when the error is not tied to a
/// particular line of a config file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A protocol invariant was broken internally (e.g. mismatched buffer lengths).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A check was asked to run on data that lacks what it needs.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace p2pbandit
