#pragma once

#include <stdexcept>
#include <string>

namespace hoiforge {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file does not parse under the expected schema. Carries line/field context.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Parsed data violates a domain invariant (duplicate ids, out-of-range class, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument is outside the operation's domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Unknown category or object id.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Image cannot be associated (no person detections).
class AssociationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hoiforge
