#pragma once

#include <stdexcept>
#include <string>

namespace trackgen {

// Every failure surfaced by the library derives from Error. The CLI maps
// ValidationError (and its subclasses) to exit code 1 and everything else to 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "format"; }
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "dimension"; }
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "config"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
};

class TrainingError : public NumericError {
 public:
  TrainingError(const std::string& what, long step)
      : NumericError(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }
  const char* kind() const noexcept override { return "training"; }

 private:
  long step_;
};

class PlacementError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "placement"; }
};

class CapabilityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "capability"; }
};

}  // namespace trackgen
