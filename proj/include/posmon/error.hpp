#pragma once

#include <stdexcept>
#include <string>

namespace posmon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two elements (or an element and a descriptor) live in different groups.
class GroupMismatch : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was violated (zero where nonzero is
/// required, negative element, bad family parameter, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not available for this family or group.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Text or JSON input could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace posmon
