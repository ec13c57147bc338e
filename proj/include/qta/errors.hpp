#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qta {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Beta(0,0) carries no evidence; its mean and variance are undefined.
class NoEvidenceError : public Error {
public:
  using Error::Error;
};

/// No Beta hyperparameters exist for the given (mean, variance) pair.
class InfeasibleMomentsError : public Error {
public:
  using Error::Error;
};

class EmptyConjunctionError : public Error {
public:
  using Error::Error;
};

/// A sound sanitizer cannot accept code that has no undefined behavior.
class SoundnessViolationError : public Error {
public:
  using Error::Error;
};

/// Document validation failure; `path()` points at the offending field.
class SchemaError : public Error {
public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

class DuplicateIdError : public Error {
public:
  using Error::Error;
};

class DanglingReferenceError : public Error {
public:
  using Error::Error;
};

/// A process reduction needs at least one uncontrolled hypothesis.
class NoReductionSourceError : public Error {
public:
  using Error::Error;
};

class LastControlledNodeError : public Error {
public:
  using Error::Error;
};

class InsufficientEvidenceError : public Error {
public:
  explicit InsufficientEvidenceError(std::string node_id)
      : Error("no usable evidence for node '" + node_id + "'"),
        node_id_(std::move(node_id)) {}

  const std::string& node_id() const noexcept { return node_id_; }

private:
  std::string node_id_;
};

class MalformedEventError : public Error {
public:
  using Error::Error;
};

class SequenceRegressionError : public Error {
public:
  using Error::Error;
};

class UnknownCounterError : public Error {
public:
  using Error::Error;
};

class CorruptLogError : public Error {
public:
  CorruptLogError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Fixed-point iteration did not reach a fixed point; `ub_counts()` is the
/// instance-count sequence observed so far, for auditing strict decrease.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& what, std::vector<std::size_t> ub_counts)
      : Error(what), ub_counts_(std::move(ub_counts)) {}

  const std::vector<std::size_t>& ub_counts() const noexcept { return ub_counts_; }

private:
  std::vector<std::size_t> ub_counts_;
};

class NotAFixedPointError : public Error {
public:
  using Error::Error;
};

class InvalidAdaptationError : public Error {
public:
  using Error::Error;
};

class MonotonicityViolationError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace qta
