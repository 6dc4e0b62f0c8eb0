#pragma once

#include <span>
#include <vector>

#include "sattack/attack/engine.hpp"

namespace sattack {

struct FrozenStudy {
  double cr_live = 0.0;
  double cr_frozen = 0.0;
  std::vector<AttackReport> live;    ///< Instance order.
  std::vector<AttackReport> frozen;  ///< Same instances as `live`.
};

/// Attacks the dataset twice with the same seed, once with the neighbors'
/// predictions live in the loss and once frozen at their unattacked values.
FrozenStudy frozen_neighbor_study(const Predictor& predictor, std::span<const Scene> dataset,
                                  const AttackConfig& config, Execution exec = Execution::parallel);

/// Instances where two neighbors come closer than gamma after the attack but
/// not before it.
std::size_t neighbor_collision_scan(std::span<const AttackReport> reports, double gamma);

}  // namespace sattack
