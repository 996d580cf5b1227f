#pragma once

#include <stdexcept>
#include <string>

namespace esr {

// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument violates a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A lookup into caller-provided configuration (e.g. a DetectionModel) failed.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an outcome whose probability is (numerically) zero.
class ZeroProbabilityBranch : public Error {
 public:
  using Error::Error;
};

// A conditional probability or frequency has an empty denominator.
class UndefinedConditional : public Error {
 public:
  using Error::Error;
};

}  // namespace esr
