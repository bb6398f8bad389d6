#pragma once

#include <stdexcept>
#include <string>

namespace wreathwalk {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Probe outside the materialized depth, or an argument outside its domain.
struct RangeError : Error {
  using Error::Error;
};

// Input that violates a documented invariant (growth spec, profile, degrees).
struct ValidationError : Error {
  using Error::Error;
};

// f' evaluated to something unusable.
struct EvaluationError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Internal consistency check failed (construction bug, never user input).
struct InternalError : Error {
  using Error::Error;
};

}  // namespace wreathwalk
