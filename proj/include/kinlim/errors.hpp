#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kinlim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (negative density, out-of-range gamma, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inputs are individually valid but mutually inconsistent (e.g. a velocity
/// profile whose mass does not match the stated density).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Field or grid shapes do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// The velocity grid cannot hold the support of an equilibrium.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double required_v_max)
      : Error(what), required_v_max_(required_v_max) {}
  double required_v_max() const noexcept { return required_v_max_; }

 private:
  double required_v_max_;
};

/// A time step violates a stability guard.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double bound) : Error(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

/// NaN, infinity or negativity appeared during time integration.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Run-file parse or validation problem. `line` is 0 when not tied to a line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The operation does not support this kind of potential.
class UnsupportedSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace kinlim
