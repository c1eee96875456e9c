#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace multimatch {

// Input data is well-formed syntactically but violates a model rule
// (negative score, same-source pair, unknown entity in a truth file, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A text record could not be parsed. `line()` is 1-based.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Caller broke a documented precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An exact solver refused an instance whose search space exceeds its bound.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multimatch
