#pragma once

#include <stdexcept>
#include <string>

namespace scl {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested quantity is smaller than the working precision can resolve.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, int level)
      : Error(what + " (level " + std::to_string(level) + ")"), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// Integer overflow while building convergents.
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, int level)
      : Error(what + " (level " + std::to_string(level) + ")"), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// Input violates a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Combinatorial structure of a partition is not what the theory predicts.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure (tuning, return detection, quadrature) did not finish.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace scl
