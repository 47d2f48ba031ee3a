#pragma once

#include <stdexcept>
#include <string>

namespace lidual {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Node list does not describe a valid event tree.
class MalformedTree : public Error {
 public:
  using Error::Error;
};

/// Scenario data inconsistent with its tree (sizes, unknown node names, ...).
class MalformedScenario : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (x < 0, y <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stalled or hit its iteration cap.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The requested (x, q) admits no admissible plan, or lies outside the
/// interior of the primal domain where a solver requires it.
class InfeasibleProblem : public Error {
 public:
  using Error::Error;
};

/// The optimum forces zero consumption on positive clock mass while U(t, 0)
/// is -infinity; the value is -infinity.
class DegenerateValue : public Error {
 public:
  using Error::Error;
};

/// Deflator extension from primal multipliers violated the cone constraints.
class ExtensionFailure : public Error {
 public:
  using Error::Error;
};

/// Finite-difference perturbation left the interior of the primal domain.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

/// Brute-force grid larger than the configured guard.
class GridGuard : public Error {
 public:
  using Error::Error;
};

}  // namespace lidual
