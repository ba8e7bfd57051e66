#ifndef MINGRAPH_ERROR_HPP
#define MINGRAPH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mingraph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite numbers, malformed configs, unreadable files.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A model was evaluated outside its domain (e.g. at the vertex of a cone).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil would read outside the grid.
class StencilError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampler could not reach the requested acceptance rate.
class SamplingFailure : public Error {
 public:
  using Error::Error;
};

/// A model violates a hypothesis required by a check (carries the witness in the message).
class PredicateViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace mingraph

#endif  // MINGRAPH_ERROR_HPP
