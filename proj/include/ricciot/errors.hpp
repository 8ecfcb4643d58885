#pragma once

#include <stdexcept>
#include <string>

namespace ricciot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time or coordinate outside the declared domain of an object.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Minimizing geodesic is not unique (or too close to being non-unique).
class CutLocusError : public Error {
 public:
  using Error::Error;
};

/// Invalid construction arguments, e.g. a flow that fails its declared
/// super-Ricci condition or a cost with p <= 0.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The discretization is too coarse for the requested accuracy.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ricciot
