#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sattack/core/metrics.hpp"
#include "sattack/parallel.hpp"
#include "sattack/predictors/pool_lite.hpp"

namespace sattack {

enum class Augmentation { sattack, random };

std::string_view to_string(Augmentation a);
Augmentation parse_augmentation(std::string_view text);

struct FinetuneConfig {
  int epochs = 10;
  double learning_rate = 3e-4;
  std::size_t batch_size = 16;  ///< Original scenes per step; the mixed batch is twice this.
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
  Augmentation augmentation = Augmentation::sattack;

  void validate() const;
};

struct RobustnessMetrics {
  DisplacementError accuracy;  ///< Unattacked, all agents.
  double cr_original = 0.0;    ///< %
  double cr_attacked = 0.0;    ///< %, soft attack with the given config.
};

/// Accuracy and collision rates of `params` on `held_out`; the attack runs
/// in soft mode regardless of attack.mode.
RobustnessMetrics evaluate_robustness(const PoolLiteParams& params, std::span<const Scene> held_out,
                                      const AttackConfig& attack, Execution exec = Execution::parallel);

struct FinetuneResult {
  PoolLiteParams params;
  RobustnessMetrics before;
  RobustnessMetrics after;
  std::vector<double> loss_curve;  ///< Mean mixed-batch loss per epoch.
};

/// Adversarial fine-tuning. Each step attacks the batch's scenes (one
/// seeded random candidate per scene, soft mode, or random noise with
/// Augmentation::random) with the current parameters, then trains on the
/// originals and the perturbed copies together, both against the original
/// ground truth. `params` is copied, never modified.
FinetuneResult adversarial_finetune(const PoolLiteParams& params, std::span<const Scene> train,
                                    std::span<const Scene> held_out, const AttackConfig& attack,
                                    const FinetuneConfig& config, Execution exec = Execution::parallel);

/// Same, for a predictor that must be pool-lite; anything else throws
/// Error(not_differentiable).
FinetuneResult adversarial_finetune(const Predictor& predictor, std::span<const Scene> train,
                                    std::span<const Scene> held_out, const AttackConfig& attack,
                                    const FinetuneConfig& config, Execution exec = Execution::parallel);

/// Before/after table with ADE, FDE, original CR and attacked CR columns.
std::string finetune_table(const FinetuneResult& result);

}  // namespace sattack
