#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sattack {

enum class ErrorCode {
  no_neighbors,
  shape,
  empty_dataset,
  no_ground_truth,
  insufficient_history,
  non_scalar_loss,
  invalid_weights,
  not_differentiable,
  invalid_config,
  parse,
  io,
  numeric,
  mismatch,
};

std::string_view to_string(ErrorCode code);

/// Exception type used throughout the library. The code lets callers (the CLI
/// in particular) map failures to exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace sattack
