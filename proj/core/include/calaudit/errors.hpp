#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace calaudit {

/// Base class for all errors raised by calaudit on bad data or degenerate
/// inputs. Precondition violations by the caller (bad parameters) are
/// reported with std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// A metric or sampling step needs both label classes (or enough records)
/// and did not get them.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// Fewer than three non-zero paired differences remain for a signed-rank test.
class InsufficientPairsError : public Error {
 public:
  using Error::Error;
};

}  // namespace calaudit
