#pragma once

#include <stdexcept>
#include <string>

namespace kellylab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A distribution, kernel row or table failed validation.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class InvalidStrategy : public Error {
 public:
  using Error::Error;
};

/// p puts mass where q has none.
class AbsoluteContinuityViolation : public Error {
 public:
  using Error::Error;
};

class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

/// A conditional was requested on a zero-probability (or unrecorded) history.
class UndefinedConditional : public Error {
 public:
  using Error::Error;
};

/// A wealth factor <= 0 was hit on a positive-probability outcome.
class RuinEncountered : public Error {
 public:
  using Error::Error;
};

class UnsupportedForHorseRace : public Error {
 public:
  using Error::Error;
};

/// JSON input that does not match the documented schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace kellylab
