#pragma once

#include <stdexcept>
#include <string>

namespace lector {

/// Base class for every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented precondition
/// (for example `root_of` on a graph that failed validation).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or schema-violating input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// An external endpoint could not produce a usable answer after retries.
class CapabilityUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace lector
