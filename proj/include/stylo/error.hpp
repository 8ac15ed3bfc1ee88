#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stylo {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed tagged-token, manifest or archive input. line() is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Numerical degeneracy (e.g. no positive eigenvalue, single-class training fold).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace stylo
