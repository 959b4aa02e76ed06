#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace demo2pddl {

// Base of every error raised by the library. The CLI maps subclasses onto
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON or schema shape).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but semantically invalid.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

// Add and delete sets overlap.
class InvalidEffect : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class NoActorError : public Error {
 public:
  using Error::Error;
};

// A segment whose start and end states agree on every relevant atom.
class NoEffectSegment : public Error {
 public:
  using Error::Error;
};

// Vocabulary/type-table conflicts, duplicate library keys and similar.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyDomain : public Error {
 public:
  using Error::Error;
};

// PDDL text that does not parse. Carries a 1-based source location.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// PDDL that parses but uses a construct outside the supported subset.
class UnsupportedFeature : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class SearchLimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace demo2pddl
