#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace macroflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed corpus input. `line` is 1-based; 0 when the problem is not tied to
// a single record (e.g. an unreadable file).
class CorpusError : public Error {
 public:
  CorpusError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Query for an author, paper, macro or node that does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

// A pipeline received nothing it can work on (no graphs, no matchable months,
// too few labeled instances).
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace macroflow
