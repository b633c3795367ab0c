#pragma once

#include <stdexcept>

namespace tripweaver {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value or parameter outside its documented range.
struct DomainError : Error {
  using Error::Error;
};

// Reference to an unknown entity (venue id, user id).
struct LookupError : Error {
  using Error::Error;
};

// Unreadable or unwritable file/stream.
struct IoError : Error {
  using Error::Error;
};

// Structurally broken input data (e.g. a mostly-malformed CSV).
struct FormatError : Error {
  using Error::Error;
};

}  // namespace tripweaver
