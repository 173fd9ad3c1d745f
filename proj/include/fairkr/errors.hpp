#pragma once

#include <stdexcept>
#include <string>

namespace fairkr {

// Base class for all library errors. Callers that do not care about the
// specific failure can catch this one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A matrix expected to be positive definite had a nonpositive pivot.
// Callers typically respond by raising the jitter and retrying.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// An iterative eigensolver hit its iteration cap.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// NaN or Inf showed up where only finite values are allowed.
class NonFinite : public Error {
 public:
  using Error::Error;
};

// One of the two demographic groups is empty.
class DegenerateGroup : public Error {
 public:
  using Error::Error;
};

class KTooLarge : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration (schema, kernel spec, grids).
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public Error {
 public:
  using Error::Error;
};

class EmptyAfterFiltering : public Error {
 public:
  using Error::Error;
};

// A binarization rule produced something other than 0 or 1.
class NonBinaryOutcome : public Error {
 public:
  using Error::Error;
};

// Resampling could not produce a split with both groups and both labels
// on both sides.
class DegenerateSplit : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Filesystem failure, annotated with the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairkr
