#pragma once

#include <stdexcept>
#include <string>

namespace lce {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Hypothesis of an operation is not met by its input (e.g. [A, X] != 0).
struct PreconditionError : Error {
  using Error::Error;
};

struct DerivativeUnavailable : Error {
  using Error::Error;
};

struct SupportError : Error {
  using Error::Error;
};

struct OdeError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace lce
