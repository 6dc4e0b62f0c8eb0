#pragma once

#include <string>
#include <vector>

#include "sattack/predictors/pool_lite.hpp"

namespace sattack {

struct Checkpoint {
  PoolLiteParams params;
  std::vector<double> loss_curve;
};

/// Versioned JSON checkpoint: format tag, architecture descriptor and hash,
/// seed, then each parameter as name + shape + flat row-major data.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);

/// Throws Error(mismatch) when the stored architecture hash differs from
/// the one implied by the stored hidden size, Error(parse) on malformed files.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sattack
