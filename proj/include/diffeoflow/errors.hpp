#pragma once

#include <stdexcept>
#include <string>

namespace diffeoflow {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

class NonFiniteSample : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientAnnuli : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Group operation produced a map whose Jacobian determinant is not positive
/// at some node, or whose displacement leaves the resolved box.
class NonDiffeomorphic : public Error {
 public:
  using Error::Error;
};

class UnderResolved : public NonDiffeomorphic {
 public:
  using NonDiffeomorphic::NonDiffeomorphic;
};

class InversionFailure : public Error {
 public:
  using Error::Error;
};

/// Trajectory blew up or left the enlarged box during evolve().
class FlowFailure : public Error {
 public:
  using Error::Error;
};

class TooFewSnapshots : public Error {
 public:
  using Error::Error;
};

}  // namespace diffeoflow
