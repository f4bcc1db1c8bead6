#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched bases or vector lengths.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// Invalid scalar parameter (out of range, wrong sign, ...).
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(what) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// State with non-finite entries.
class InvalidStateError : public Error {
 public:
  explicit InvalidStateError(const std::string& what) : Error(what) {}
};

/// Trajectory diverged; carries the failure time.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t)
      : Error(what + " at t=" + std::to_string(t)), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace ldp
