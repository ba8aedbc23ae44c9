#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kk {

// Root of every error raised by the library. The CLI maps subclasses onto
// exit codes (usage/IO vs. invariant vs. numeric failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Array shapes do not agree (wrong N, wrong value dimension, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

class DegenerateCoframeError : public Error {
 public:
  using Error::Error;
};

// A structural input (algebra, representation, form) violates a hard invariant.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(const std::string& token, std::size_t offset)
      : ParseError("unknown identifier '" + token + "'", offset), token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// Evaluation left the real domain of a function (log of a negative, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class OffManifoldError : public Error {
 public:
  using Error::Error;
};

class IntegratorError : public Error {
 public:
  using Error::Error;
};

}  // namespace kk
