#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace todaq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for (tag, rank) or (id, rank) combinations outside the catalog.
struct UnsupportedError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct UnboundSymbolError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

struct NumericError : Error {
  using Error::Error;
};

}  // namespace todaq
