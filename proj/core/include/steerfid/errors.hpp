#pragma once

#include <stdexcept>
#include <string>

namespace steerfid {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A subsystem label that does not exist in the layout it is applied to.
class AddressingError : public Error {
 public:
  using Error::Error;
};

// Mismatched matrix/vector/subsystem dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A reference system too small for the requested purification or POVM.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, malformed spec or violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The SDP solver did not reach the requested tolerances.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace steerfid
