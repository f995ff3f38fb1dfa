#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace loadshape {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A line that could not be parsed as a record. `position` is the byte
/// offset within the line where parsing gave up.
class MalformedLine : public Error {
public:
  MalformedLine(std::size_t position, std::string reason)
      : Error("malformed line at offset " + std::to_string(position) + ": " + reason),
        position_(position),
        reason_(std::move(reason)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  std::size_t position_;
  std::string reason_;
};

class IoError : public Error {
public:
  using Error::Error;
};

class DecompressionError : public Error {
public:
  using Error::Error;
};

class HttpError : public Error {
public:
  HttpError(int status, const std::string& what)
      : Error("http error " + std::to_string(status) + ": " + what), status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

/// Some hours of a requested fetch range could not be retrieved. Carries the
/// full list so callers can retry or fail loudly; the fetch never truncates.
class PartialRange : public Error {
public:
  explicit PartialRange(std::vector<std::string> missing)
      : Error("fetch incomplete, " + std::to_string(missing.size()) + " hour(s) missing"),
        missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
  std::vector<std::string> missing_;
};

/// Summary bucket width does not divide the requested bin width.
class IncompatibleBucket : public Error {
public:
  using Error::Error;
};

/// Row with zero standard deviation: a flat series has no shape to normalize.
class DegenerateRow : public Error {
public:
  using Error::Error;
};

class EmptyResult : public Error {
public:
  using Error::Error;
};

class ZeroMean : public Error {
public:
  using Error::Error;
};

/// A matrix with the wrong provenance flag was passed to a stage that only
/// accepts raw (or only preprocessed) data.
class ProvenanceViolation : public Error {
public:
  using Error::Error;
};

class LengthMismatch : public Error {
public:
  using Error::Error;
};

class TooFewRows : public Error {
public:
  using Error::Error;
};

class SingleCluster : public Error {
public:
  using Error::Error;
};

class RankDeficient : public Error {
public:
  using Error::Error;
};

/// The iterative fit and the closed-form least-squares cross-check disagree.
class FitDivergence : public Error {
public:
  using Error::Error;
};

class UnknownLabel : public Error {
public:
  using Error::Error;
};

class UnknownPattern : public Error {
public:
  using Error::Error;
};

class NoOverlap : public Error {
public:
  using Error::Error;
};

/// Burst search could not reach the requested target within its step budget.
class Unreachable : public Error {
public:
  using Error::Error;
};

class TargetUnreachable : public Error {
public:
  using Error::Error;
};

class PipelineStageError : public Error {
public:
  PipelineStageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

}  // namespace loadshape
