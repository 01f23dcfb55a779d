#pragma once

#include <stdexcept>
#include <string>

namespace nsframe {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A formula was evaluated outside its domain (divergent sum, p <= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed systems, configs, files or mismatched lengths.
class InputError : public Error {
 public:
  using Error::Error;
};

// The hypotheses of a certification method are not met by the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Quadrature or iteration failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace nsframe
