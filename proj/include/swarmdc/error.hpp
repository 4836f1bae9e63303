#pragma once

#include <stdexcept>
#include <string>

namespace swarmdc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument: mismatched grids, non-positive step, out-of-domain point...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A config file or scenario description could not be accepted.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf, negative density, runaway speed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Explicit step size outside the stability region; carries the largest admissible dt.
class CflViolation : public Error {
 public:
  CflViolation(const std::string& what, double max_dt) : Error(what), max_dt_(max_dt) {}
  double max_dt() const noexcept { return max_dt_; }

 private:
  double max_dt_;
};

}  // namespace swarmdc
