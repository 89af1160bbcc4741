#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qest {

/// Base for all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Total Hilbert-space dimension above the configured cap.
class DimensionCapError : public Error {
 public:
  DimensionCapError(std::size_t requested, std::size_t cap);
  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

class SpaceMismatchError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written; the message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Probe-spec syntax or validation error, positioned at a line/column.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column, std::string token);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& token() const noexcept { return token_; }

 private:
  int line_;
  int column_;
  std::string token_;
};

}  // namespace qest
