#pragma once

#include <stdexcept>
#include <string>

namespace riskplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TaxonomyError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invariant-violating input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class PlanningError : public Error {
 public:
  using Error::Error;
};

/// Goal cannot be reached from start without crossing impassable pixels.
class UnreachableError : public PlanningError {
 public:
  using PlanningError::PlanningError;
};

/// Surprise factor undefined (actual cost zero, expected cost nonzero).
class MetricError : public Error {
 public:
  using Error::Error;
};

class SceneRejected : public Error {
 public:
  using Error::Error;
};

}  // namespace riskplan
