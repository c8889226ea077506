#pragma once

#include <stdexcept>
#include <string>

namespace approxreg {

// Malformed or inconsistent input data (non-finite cells, ragged CSV, bad
// index ranges).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Argument combinations that violate an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// An internal numerical invariant was violated, e.g. an RSS ratio well
// above one.
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace approxreg
