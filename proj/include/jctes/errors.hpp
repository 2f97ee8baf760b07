#pragma once

#include <stdexcept>
#include <string>

namespace jctes {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition on an argument failed (dimension, range, finiteness).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Fixed-step integrator asked to take a step outside its stability bound.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

/// Population in the top Fock levels exceeded the allowed limit.
class TailOverflow : public Error {
 public:
  using Error::Error;
};

class NonConvergedKrausSum : public Error {
 public:
  using Error::Error;
};

/// Commutator preconditions of the disentangling theorem do not hold.
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

}  // namespace jctes
