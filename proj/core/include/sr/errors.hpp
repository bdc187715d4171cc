#pragma once

#include <stdexcept>
#include <string>

namespace sr {

enum class ErrorKind {
  OutOfRange,
  InvalidInput,
  DivisionByZero,
  EmptyInput,
  ShapeError,
  NonConvergence,
  RankDeficient,
  NonPositive,
  ConfigError,
  ParseError,
  IoError,
};

/// Library-wide exception. `kind()` identifies the failure class so callers
/// (the CLI in particular) can map errors onto exit codes without string
/// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace sr
