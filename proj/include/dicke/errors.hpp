#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace dicke {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the domain an operation is defined on
/// (ladder index out of range, transition requested from the top level).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vectors or operators of incompatible size were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Brute-force routines refuse qubit counts above their bound.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The target cannot be reached by the sequential ladder protocol.
class InfeasibleTarget : public Error {
 public:
  using Error::Error;
};

/// The ODE integrator could not reach the requested end time.
class IntegratorError : public Error {
 public:
  IntegratorError(const std::string& what, double time, double step)
      : Error(describe(what, time, step)),
        time_(time),
        step_(step) {}

  double time() const noexcept { return time_; }
  double step() const noexcept { return step_; }

 private:
  static std::string describe(const std::string& what, double time, double step) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (t=%.6g s, h=%.3g s)", time, step);
    return what + buf;
  }

  double time_;
  double step_;
};

/// Invalid user input (config files, amplitude lists).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dicke
