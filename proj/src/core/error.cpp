#include "sattack/core/error.hpp"

namespace sattack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::no_neighbors: return "no-neighbors";
    case ErrorCode::shape: return "shape";
    case ErrorCode::empty_dataset: return "empty-dataset";
    case ErrorCode::no_ground_truth: return "no-ground-truth";
    case ErrorCode::insufficient_history: return "insufficient-history";
    case ErrorCode::non_scalar_loss: return "non-scalar-loss";
    case ErrorCode::invalid_weights: return "invalid-weights";
    case ErrorCode::not_differentiable: return "not-differentiable";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::mismatch: return "mismatch";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace sattack
