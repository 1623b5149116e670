#include "ccc/error.hpp"

namespace ccc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::InsufficientRecords: return "InsufficientRecords";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::InsufficientFolds: return "InsufficientFolds";
    case ErrorCode::EmptyClusterMask: return "EmptyClusterMask";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyProposal: return "EmptyProposal";
    case ErrorCode::BoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace ccc
