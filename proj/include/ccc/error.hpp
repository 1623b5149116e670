#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccc {

enum class ErrorCode {
  DimensionMismatch,
  DegeneratePolygon,
  MalformedLine,
  InsufficientRecords,
  BackendUnavailable,
  ShapeMismatch,
  UndefinedMetric,
  EmptyEvaluation,
  InsufficientFolds,
  EmptyClusterMask,
  EmptyDataset,
  InvalidSpec,
  EmptyProposal,
  BoxOutOfBounds,
  InvalidTransition,
  NotFound,
  InvalidArgument,
  Io,
};

/// Stable machine-readable name, used in JSON reports and HTTP error bodies.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ccc
