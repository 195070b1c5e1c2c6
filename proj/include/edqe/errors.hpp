#pragma once

#include <stdexcept>
#include <string>

namespace edqe {

// Base for all library errors. Callers that only need a message can catch
// std::runtime_error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file or record.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A token was looked up in a model that does not contain it.
class OovError : public Error {
 public:
  explicit OovError(std::string token)
      : Error("out-of-vocabulary token: " + token), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// Arguments violate an operation's precondition (dimension mismatch,
// zero-norm vector, empty query...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace edqe
