#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pmrecycle {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An algebraic identity of the operator square failed. Signals a bug or a
// deliberately corrupted operator.
class AlgebraViolation : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  InsufficientData(const std::string& what, std::vector<int> contexts)
      : Error(what), contexts_(std::move(contexts)) {}

  /// Contexts (1..6) with no usable records.
  const std::vector<int>& contexts() const noexcept { return contexts_; }

 private:
  std::vector<int> contexts_;
};

}  // namespace pmrecycle
