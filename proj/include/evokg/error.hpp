#pragma once

#include <stdexcept>
#include <string>

namespace evokg {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input data: malformed files, schema violations, unknown labels.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Bad command-line or configuration usage.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace evokg
