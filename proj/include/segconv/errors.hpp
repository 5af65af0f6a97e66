#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace segconv {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A tensor/kernel dimension constraint was violated (degenerate geometry,
// kernel larger than input, ...).
struct ShapeError : Error {
  using Error::Error;
};

// Caller broke an API precondition (channel mismatch, zero workers, ...).
struct ContractError : Error {
  using Error::Error;
};

// Malformed file contents. byte_offset is where parsing stopped.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::size_t byte_offset;
};

// Filesystem-level failure (missing file, write error).
struct IoError : Error {
  using Error::Error;
};

// Operation invoked in the wrong order (e.g. backward before forward).
struct StateError : Error {
  using Error::Error;
};

}  // namespace segconv
