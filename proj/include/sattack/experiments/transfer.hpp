#pragma once

#include <span>
#include <vector>

#include "sattack/attack/archive.hpp"
#include "sattack/parallel.hpp"
#include "sattack/predictors/predictor.hpp"

namespace sattack {

struct TransferResult {
  std::vector<bool> collided;  ///< One flag per archive record, in archive order.
  double cr = 0.0;             ///< %
};

/// Replays archived perturbations against `target` without optimizing:
/// each record's R is added to its candidate in the matching scene and the
/// target's prediction is checked for a collision. Instances are exactly the
/// archive's. Throws Error(mismatch) when a record has no matching scene or
/// candidate, or R does not fit the observation length.
TransferResult transfer_eval(std::span<const ArchiveRecord> archive, const Predictor& target,
                             std::span<const Scene> dataset, double gamma, Execution exec = Execution::parallel);

}  // namespace sattack
