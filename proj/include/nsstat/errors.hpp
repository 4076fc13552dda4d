#pragma once

#include <stdexcept>
#include <string>

namespace nsstat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LatticeMismatchError : public Error {
 public:
  LatticeMismatchError() : Error("fields live on different lattices") {}
};

class SymmetryViolationError : public Error {
 public:
  explicit SymmetryViolationError(double defect)
      : Error("raw spectrum is not Hermitian-symmetric (defect " + std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

/// Numerical failure of the time integrator (non-finite state, stalled iteration).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class OutOfIntervalError : public Error {
 public:
  using Error::Error;
};

class InsufficientCoverageError : public Error {
 public:
  using Error::Error;
};

class PastingMismatchError : public Error {
 public:
  explicit PastingMismatchError(double gap)
      : Error("pasting mismatch: L2 gap " + std::to_string(gap) + " at the seam"), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsstat
