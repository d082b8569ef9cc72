#pragma once

#include <stdexcept>
#include <string>

namespace khl {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidCoefficients : public Error {
 public:
  using Error::Error;
};

/// Thrown when a sign-sum would need more than the supported number of terms.
class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class LambdaOutOfRange : public Error {
 public:
  using Error::Error;
};

class CapInfeasible : public Error {
 public:
  using Error::Error;
};

/// Thrown when two vectors are not comparable in the majorization order.
class NotComparable : public Error {
 public:
  using Error::Error;
};

/// Thrown when an input violates the hypothesis of the bound being checked.
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

}  // namespace khl
